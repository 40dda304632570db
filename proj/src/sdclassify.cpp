#include "homflow/sdclassify.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <json.hpp>

namespace homflow {

std::string rank_one_family_name(RankOneFamily f) {
    switch (f) {
        case RankOneFamily::SOd1: return "SO(d,1)";
        case RankOneFamily::SUd1: return "SU(d,1)";
        case RankOneFamily::Spd1: return "Sp(d,1)";
        case RankOneFamily::F4m20: return "F4^-20";
    }
    return "?";
}

RankOneFamily parse_rank_one_family(const std::string& s) {
    std::string t;
    for (char c : s) {
        if (c == '(' || c == '^') break;
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        t.push_back(char(std::toupper(static_cast<unsigned char>(c))));
    }
    if (t == "SO") return RankOneFamily::SOd1;
    if (t == "SU") return RankOneFamily::SUd1;
    if (t == "SP") return RankOneFamily::Spd1;
    if (t == "F4" || t == "F4M20" || t == "F4-20") return RankOneFamily::F4m20;
    throw std::invalid_argument("unknown rank-one family '" + s + "'");
}

RankOneData rank_one_data(RankOneFamily family, int d) {
    RankOneData r;
    r.family = family;
    switch (family) {
        case RankOneFamily::SOd1:
            if (d < 2) throw std::invalid_argument("SO(d,1) needs d >= 2");
            r.d = d;
            r.p = d - 1;
            r.q = 0;
            r.rho = Rat(d - 1, 2);
            r.rho0 = r.rho;
            r.kappa = 2;
            break;
        case RankOneFamily::SUd1:
            if (d < 2) throw std::invalid_argument("SU(d,1) needs d >= 2");
            r.d = d;
            r.p = 2 * (d - 1);
            r.q = 1;
            r.rho = Rat(d);
            r.rho0 = r.rho;
            r.kappa = 1;
            break;
        case RankOneFamily::Spd1:
            if (d < 2) throw std::invalid_argument("Sp(d,1) needs d >= 2");
            r.d = d;
            r.p = 4 * (d - 1);
            r.q = 3;
            r.rho = Rat(2 * d + 1);
            r.rho0 = r.rho - Rat(2);
            r.kappa = 1;
            break;
        case RankOneFamily::F4m20:
            r.d = 2;
            r.p = 8;
            r.q = 7;
            r.rho = Rat(11);
            r.rho0 = Rat(5);
            r.kappa = 1;
            break;
    }
    return r;
}

SpectralGapParam congruence_tau_preset(RankOneFamily family, int d) {
    SpectralGapParam out;
    out.provenance = SpectralGapParam::Provenance::CongruencePreset;
    switch (family) {
        case RankOneFamily::SOd1:
            if (d < 2) throw std::invalid_argument("SO(d,1) needs d >= 2");
            out.tau = (d == 2) ? Rat(25, 64) : (d == 3) ? Rat(25, 32) : Rat(1);
            return out;
        case RankOneFamily::SUd1:
            if (d < 2) throw std::invalid_argument("SU(d,1) needs d >= 2");
            out.tau = (d == 2) ? Rat(6, 5) : Rat(2);
            return out;
        default:
            throw std::invalid_argument(rank_one_family_name(family) +
                                        " is unconditionally SD; no spectral-gap preset");
    }
}

FlowComponent flow_component_from(const FlowDescriptor& fd) {
    FlowComponent fc;
    switch (fd.kind) {
        case FlowKind::QuasiUnipotent:
            fc.kind = FlowComponent::Kind::UnboundedQuasiUnipotent;
            fc.l = fd.l;
            break;
        case FlowKind::QuasiDiagonalizable:
            fc.kind = FlowComponent::Kind::UnboundedQuasiDiagonalizable;
            break;
        case FlowKind::Bounded:
            fc.kind = FlowComponent::Kind::Bounded;
            break;
    }
    return fc;
}

std::string DecayExponent::str() const {
    switch (form) {
        case Form::Exponential: return "exponential";
        case Form::Unspecified: return "unspecified";
        case Form::Polynomial: return coeff.str() + (uses_epsilon ? "(1-eps)" : "");
    }
    return "?";
}

bool exponent_exceeds_one(const DecayExponent& e) {
    switch (e.form) {
        case DecayExponent::Form::Exponential: return true;
        case DecayExponent::Form::Unspecified: return false;
        case DecayExponent::Form::Polynomial: return e.coeff > Rat(1);
    }
    return false;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Conditional: return "conditional";
    }
    return "?";
}

namespace {

DecayExponent poly(Rat c) { return DecayExponent{DecayExponent::Form::Polynomial, c, true}; }
DecayExponent expo() { return DecayExponent{DecayExponent::Form::Exponential, Rat(0), false}; }
DecayExponent unspecified() { return DecayExponent{DecayExponent::Form::Unspecified, Rat(0), false}; }

// Ordering of exponents evaluated at eps = 0; exponential beats everything.
bool stronger(const DecayExponent& a, const DecayExponent& b) {
    auto key = [](const DecayExponent& e) -> double {
        switch (e.form) {
            case DecayExponent::Form::Exponential: return 1e300;
            case DecayExponent::Form::Unspecified: return -1;
            case DecayExponent::Form::Polynomial: return e.coeff.to_double();
        }
        return -1;
    };
    return key(a) > key(b);
}

}  // namespace

SDVerdict classify_higher_rank_simple(RootSystemType type, const FlowComponent& flow) {
    if (!admissible_type(type))
        throw std::invalid_argument("inadmissible root system type " + type_name(type));
    if (type.rank < 2)
        throw std::invalid_argument("rank-one factor: use the rank-one classification");
    if (flow.kind == FlowComponent::Kind::Bounded)
        throw std::invalid_argument("flow must be unbounded for the SD classification");

    SDVerdict v;
    if (flow.kind == FlowComponent::Kind::UnboundedQuasiDiagonalizable) {
        v.is_sd = Verdict::Yes;
        v.exponent = expo();
        v.rationale = {
            "quasi-diagonalizable generator: adjoint norms grow like e^{ct}, c > 0",
            "matrix coefficients decay exponentially, which is summable: SD",
        };
        return v;
    }
    const int l = flow.l;
    if (l < 2) throw std::invalid_argument("quasi-unipotent flow needs ad-nilpotency degree >= 2");

    const bool good = strong_decay_type(type);
    if (good) {
        v.exponent = poly(Rat(l));
        v.is_sd = Verdict::Yes;
        v.rationale = {
            "restricted root system " + type_name(type) +
                ": the decay weight xi dominates the highest root on the positive chamber",
            "quasi-unipotent generator, ad-nilpotency degree l = " + std::to_string(l) +
                ": adjoint profile |t|^l carries over to coefficient decay |t|^{-l(1-eps)}",
            "exponent " + v.exponent.str() + " exceeds 1 at eps = 0: SD",
        };
        return v;
    }
    if (l >= 3) {
        v.exponent = poly(Rat(l, 2));
        v.is_sd = Verdict::Yes;
        v.rationale = {
            "restricted root system " + type_name(type) +
                ": xi does not dominate the highest root, only the half-profile bound applies",
            "quasi-unipotent generator, l = " + std::to_string(l) +
                ": coefficient decay |t|^{-l/2 (1-eps)}",
            "exponent " + v.exponent.str() + " exceeds 1 at eps = 0: SD",
        };
        return v;
    }
    v.exponent = poly(Rat(1));
    v.is_sd = Verdict::No;
    v.rationale = {
        "restricted root system " + type_name(type) +
            ": xi does not dominate the highest root, only the half-profile bound applies",
        "quasi-unipotent generator with l = 2: decay bound |t|^{-(1-eps)} only",
        "exponent does not exceed 1 at eps = 0: not SD",
    };
    return v;
}

SDVerdict classify_rank_one(RankOneFamily family, int d, const SpectralGapParam& tau) {
    const RankOneData data = rank_one_data(family, d);
    SDVerdict v;
    if (family == RankOneFamily::Spd1 || family == RankOneFamily::F4m20) {
        const Rat c = (data.rho - data.rho0) * Rat(data.kappa);
        v.is_sd = Verdict::Yes;
        v.exponent = poly(c);
        v.rationale = {
            rank_one_family_name(family) + ": exceptional spherical spectrum is bounded by rho0 = " +
                data.rho0.str() + " alpha, so tau >= rho - rho0 = " + (data.rho - data.rho0).str() +
                " unconditionally",
            "kappa * tau >= " + c.str() + " > 1: every unbounded one-parameter flow is SD",
        };
        return v;
    }
    const std::string crit =
        "criterion: SD iff kappa * tau > 1, kappa = " + std::to_string(data.kappa) + " for " +
        rank_one_family_name(family);
    if (!tau.tau.has_value()) {
        v.is_sd = Verdict::Conditional;
        v.exponent = unspecified();
        v.rationale = {"spectral gap tau unknown for this lattice", crit};
        return v;
    }
    const Rat kt = *tau.tau * Rat(data.kappa);
    v.exponent = poly(kt);
    const bool preset = tau.provenance == SpectralGapParam::Provenance::CongruencePreset;
    const std::string tau_src = preset ? " (congruence-lattice preset)" : "";
    if (kt > Rat(1)) {
        v.is_sd = Verdict::Yes;
        v.rationale = {
            "tau = " + tau.tau->str() + tau_src + ", kappa * tau = " + kt.str() + " > 1",
            "coefficient decay |t|^{-kappa tau (1-eps)} is summable: SD",
        };
    } else {
        v.is_sd = Verdict::Conditional;
        v.rationale = {
            "tau = " + tau.tau->str() + tau_src + ", kappa * tau = " + kt.str() + " <= 1",
            "summability criterion fails; SD not established by the spectral bound",
            crit,
        };
    }
    return v;
}

namespace {

bool factor_unbounded(const GroupFactor& f) {
    return f.flow.kind != FlowComponent::Kind::Bounded;
}

bool factor_has_property_t(const GroupFactor& f) {
    if (f.higher_rank) return true;  // simple, rank >= 2
    return f.family == RankOneFamily::Spd1 || f.family == RankOneFamily::F4m20;
}

SDVerdict classify_factor(const GroupFactor& f) {
    if (f.higher_rank) return classify_higher_rank_simple(f.root_type, f.flow);
    SpectralGapParam tau;
    tau.tau = f.tau;
    return classify_rank_one(f.family, f.d, tau);
}

}  // namespace

SDVerdict classify_semisimple(const GroupSpec& spec) {
    if (spec.factors.empty()) throw std::invalid_argument("group spec needs at least one factor");
    const int k = int(std::count_if(spec.factors.begin(), spec.factors.end(), factor_unbounded));
    if (k == 0)
        throw std::invalid_argument(
            "every factor flow is bounded; the classification assumes an unbounded flow");

    if (k == 1 && spec.factors.size() >= 1) {
        auto it = std::find_if(spec.factors.begin(), spec.factors.end(), factor_unbounded);
        SDVerdict v = classify_factor(*it);
        v.rationale.insert(v.rationale.begin(),
                           "single essential factor: the flow is bounded in every other factor, "
                           "so the verdict is that factor's classification");
        return v;
    }

    SDVerdict v;
    const bool all_t = std::all_of(spec.factors.begin(), spec.factors.end(), factor_has_property_t);
    if (!all_t) {
        v.is_sd = Verdict::Conditional;
        v.exponent = unspecified();
        v.rationale = {
            std::to_string(k) + " essential factors, but a factor without property (T) is present",
            "the uniform k(1-eps) decay needs property (T) for every factor: verdict conditional",
        };
        return v;
    }
    v.is_sd = Verdict::Yes;
    v.exponent = poly(Rat(k));
    v.rationale = {
        "property (T) holds for every factor",
        "k = " + std::to_string(k) + " essential factors: coefficient decay |t|^{-k(1-eps)}",
        "exponent " + v.exponent.str() + " exceeds 1 at eps = 0: SD",
    };
    return v;
}

DecayExponent uniform_decay_exponent(const GroupSpec& spec) {
    if (spec.factors.empty()) throw std::invalid_argument("group spec needs at least one factor");
    const int k = int(std::count_if(spec.factors.begin(), spec.factors.end(), factor_unbounded));
    if (k == 0)
        throw std::invalid_argument(
            "every factor flow is bounded; the classification assumes an unbounded flow");
    DecayExponent best = poly(Rat(std::max(k, 1)));
    for (const auto& f : spec.factors) {
        if (!factor_unbounded(f)) continue;
        const DecayExponent e = classify_factor(f).exponent;
        if (stronger(e, best)) best = e;
    }
    // Never below the baseline 1-eps.
    if (stronger(poly(Rat(1)), best)) best = poly(Rat(1));
    return best;
}

GroupSpec parse_group_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("group spec JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array() ||
        j["factors"].empty())
        throw std::invalid_argument("group spec JSON: expected {\"factors\": [...]} with at least one factor");

    GroupSpec spec;
    for (const auto& jf : j["factors"]) {
        GroupFactor f;
        if (jf.contains("higher_rank")) {
            f.higher_rank = true;
            f.root_type = parse_type(jf.at("higher_rank").at("type").get<std::string>());
            if (f.root_type.rank < 2)
                throw std::invalid_argument("higher-rank factor needs rank >= 2");
        } else if (jf.contains("rank_one")) {
            f.higher_rank = false;
            const auto& jr = jf.at("rank_one");
            f.family = parse_rank_one_family(jr.at("family").get<std::string>());
            f.d = jr.value("d", 2);
            rank_one_data(f.family, f.d);  // validates d
        } else {
            throw std::invalid_argument("factor needs either \"higher_rank\" or \"rank_one\"");
        }

        if (!jf.contains("flow")) throw std::invalid_argument("factor needs a \"flow\"");
        const auto& jflow = jf.at("flow");
        if (jflow.contains("generator")) {
            const Mat m = parse_matrix_json(jflow.at("generator").dump());
            if (m.rows() != m.cols())
                throw std::invalid_argument("flow generator must be square");
            const AlgebraElement x = make_sl(int(m.rows()), m);
            f.flow = flow_component_from(classify_flow(x));
        } else if (jflow.contains("kind")) {
            const std::string kind = jflow.at("kind").get<std::string>();
            if (kind == "quasi_unipotent") {
                f.flow.kind = FlowComponent::Kind::UnboundedQuasiUnipotent;
                f.flow.l = jflow.at("l").get<int>();
                if (f.flow.l < 2)
                    throw std::invalid_argument("quasi-unipotent flow needs l >= 2");
            } else if (kind == "quasi_diagonalizable") {
                f.flow.kind = FlowComponent::Kind::UnboundedQuasiDiagonalizable;
            } else if (kind == "bounded") {
                f.flow.kind = FlowComponent::Kind::Bounded;
            } else {
                throw std::invalid_argument("unknown flow kind '" + kind + "'");
            }
        } else {
            throw std::invalid_argument("flow needs a \"kind\" or a \"generator\"");
        }

        if (jf.contains("tau")) {
            if (f.higher_rank)
                throw std::invalid_argument("tau only applies to rank-one factors");
            const auto& jt = jf.at("tau");
            if (jt.is_string()) {
                const std::string s = jt.get<std::string>();
                f.tau = (s == "congruence") ? congruence_tau_preset(f.family, f.d).tau
                                            : std::optional<Rat>(parse_rat(s));
            } else if (jt.is_number_integer()) {
                f.tau = Rat(jt.get<std::int64_t>());
            } else {
                throw std::invalid_argument(
                    "tau must be an integer, a \"p/q\" string, or \"congruence\"");
            }
        }
        spec.factors.push_back(std::move(f));
    }
    return spec;
}

std::string verdict_to_json(const SDVerdict& v) {
    nlohmann::json j;
    j["is_sd"] = verdict_name(v.is_sd);
    j["exponent"] = v.exponent.str();
    j["rationale"] = v.rationale;
    return j.dump(2);
}

int verdict_exit_code(const SDVerdict& v) {
    switch (v.is_sd) {
        case Verdict::Yes: return 0;
        case Verdict::No: return 1;
        case Verdict::Conditional: return 2;
    }
    return 2;
}

}  // namespace homflow
