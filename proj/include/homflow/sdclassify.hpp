#pragma once

// Summable-decay (SD) classification of one-parameter homogeneous flows.
//
// A flow is SD when its spherical matrix coefficients decay like |t|^{-eta}
// for some eta > 1.  The verdict is produced combinatorially: higher-rank
// simple factors are decided by the restricted root system together with the
// generator's Jordan type, rank-one factors by the (p, q, rho, kappa) data
// and a spectral-gap parameter tau, and semisimple groups by counting
// essential (unbounded) factors.

#include <optional>
#include <string>
#include <vector>

#include "homflow/liealg.hpp"
#include "homflow/rational.hpp"
#include "homflow/rootsys.hpp"

namespace homflow {

// ---------------------------------------------------------------- rank one

enum class RankOneFamily { SOd1, SUd1, Spd1, F4m20 };

std::string rank_one_family_name(RankOneFamily f);  // "SO(d,1)", ..., "F4^-20"
// Accepts "SO", "SU", "SP", "F4", case-insensitive, with optional "(d,1)" /
// "^-20" decorations.
RankOneFamily parse_rank_one_family(const std::string& s);

// Root multiplicities and spectral data of the rank-one simple groups:
// p = multiplicity of alpha, q = multiplicity of 2 alpha, rho and rho0 as
// multiples of alpha, kappa the cusp-decay factor (2 for SO(d,1), else 1).
struct RankOneData {
    RankOneFamily family;
    int d = 0;
    int p = 0;
    int q = 0;
    Rat rho;
    Rat rho0;
    int kappa = 1;
};

// d >= 2 for SO/SU/Sp; ignored for F4m20 (normalized to d = 2).
RankOneData rank_one_data(RankOneFamily family, int d);

struct SpectralGapParam {
    enum class Provenance { UserSupplied, CongruencePreset };
    std::optional<Rat> tau;  // empty = unknown
    Provenance provenance = Provenance::UserSupplied;
};

// Known lower bounds for tau over congruence lattices; available for SO(d,1)
// and SU(d,1) only (Sp and F4^-20 are unconditional and need none).
SpectralGapParam congruence_tau_preset(RankOneFamily family, int d);

// ------------------------------------------------------------ group specs

// Symbolic flow component of one factor; numeric generators reduce to this
// through classify_flow.
struct FlowComponent {
    enum class Kind { UnboundedQuasiUnipotent, UnboundedQuasiDiagonalizable, Bounded };
    Kind kind = Kind::Bounded;
    int l = 0;  // ad-nilpotency degree, quasi-unipotent only
};
FlowComponent flow_component_from(const FlowDescriptor& fd);

struct GroupFactor {
    bool higher_rank = true;
    RootSystemType root_type;       // higher-rank factors
    RankOneFamily family = RankOneFamily::SOd1;  // rank-one factors
    int d = 0;
    FlowComponent flow;
    std::optional<Rat> tau;  // rank-one spectral gap, when known
};

struct GroupSpec {
    std::vector<GroupFactor> factors;
};

// ---------------------------------------------------------------- verdicts

struct DecayExponent {
    enum class Form { Polynomial, Exponential, Unspecified };
    Form form = Form::Unspecified;
    Rat coeff;                 // c in |t|^{-c} or |t|^{-c(1-eps)}
    bool uses_epsilon = true;
    std::string str() const;   // "4(1-eps)", "exponential", ...
};

// Strictly greater than 1 evaluated at eps = 0; exponential counts as yes.
bool exponent_exceeds_one(const DecayExponent& e);

enum class Verdict { Yes, No, Conditional };
std::string verdict_name(Verdict v);

struct SDVerdict {
    Verdict is_sd = Verdict::Conditional;
    DecayExponent exponent;
    std::vector<std::string> rationale;
};

// Higher-rank simple factor: good types are SD for every unbounded flow;
// bad types are SD unless the flow is quasi-unipotent with l = 2.
// Requires rank >= 2 and an unbounded flow.
SDVerdict classify_higher_rank_simple(RootSystemType type, const FlowComponent& flow);

// Rank-one factor: Sp(d,1) and F4^-20 are unconditionally SD; SO/SU need
// kappa * tau > 1, and report a conditional verdict when tau is unknown or
// the criterion fails.
SDVerdict classify_rank_one(RankOneFamily family, int d, const SpectralGapParam& tau);

// Semisimple group: k = number of unbounded factor flows.  k >= 2 gives SD
// with exponent k(1-eps) when every factor has property (T); k = 1 defers to
// the single essential factor.  Throws when every factor flow is bounded.
SDVerdict classify_semisimple(const GroupSpec& spec);

// The strongest decay exponent the classification yields for the spec:
// max of k(1-eps) and the per-factor refinements, never below 1-eps.
DecayExponent uniform_decay_exponent(const GroupSpec& spec);

// ------------------------------------------------------------------- JSON

// {"factors": [{"higher_rank": {"type": "A2"},
//               "flow": {"kind": "quasi_unipotent", "l": 4}},
//              {"rank_one": {"family": "SO", "d": 3},
//               "flow": {"generator": [[...], ...]},
//               "tau": "25/32"}]}
// A factor's flow is either symbolic ("kind" (+ "l")) or a literal generator
// matrix, which is classified numerically.  "tau": "congruence" pulls the
// preset for the family.
GroupSpec parse_group_spec_json(const std::string& text);

std::string verdict_to_json(const SDVerdict& v);
int verdict_exit_code(const SDVerdict& v);  // 0 = yes, 1 = no, 2 = conditional

}  // namespace homflow
