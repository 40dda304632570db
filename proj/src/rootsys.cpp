#include "homflow/rootsys.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace homflow {

bool admissible_type(RootSystemType t) {
    switch (t.family) {
        case RootFamily::A: return t.rank >= 1;
        case RootFamily::B: return t.rank >= 2;
        case RootFamily::C: return t.rank >= 3;
        case RootFamily::D: return t.rank >= 4;
        case RootFamily::E: return t.rank >= 6 && t.rank <= 8;
        case RootFamily::F: return t.rank == 4;
        case RootFamily::G: return t.rank == 2;
    }
    return false;
}

RootSystemType parse_type(const std::string& s) {
    if (s.size() < 2 || !std::isalpha(static_cast<unsigned char>(s[0])))
        throw std::invalid_argument("root system type: expected letter followed by rank, got '" + s + "'");
    char fam = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (fam < 'A' || fam > 'G')
        throw std::invalid_argument("root system family must be one of A-G, got '" + s + "'");
    int rank = 0;
    try {
        std::size_t pos = 0;
        rank = std::stoi(s.substr(1), &pos);
        if (pos != s.size() - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("could not parse rank in root system type '" + s + "'");
    }
    RootSystemType t{static_cast<RootFamily>(fam), rank};
    if (!admissible_type(t))
        throw std::invalid_argument("inadmissible root system type '" + s + "'");
    return t;
}

std::string type_name(RootSystemType t) {
    return std::string(1, static_cast<char>(t.family)) + std::to_string(t.rank);
}

int positive_root_count(RootSystemType t) {
    int n = t.rank;
    switch (t.family) {
        case RootFamily::A: return n * (n + 1) / 2;
        case RootFamily::B:
        case RootFamily::C: return n * n;
        case RootFamily::D: return n * (n - 1);
        case RootFamily::E:
            if (n == 6) return 36;
            if (n == 7) return 63;
            return 120;
        case RootFamily::F: return 24;
        case RootFamily::G: return 6;
    }
    return 0;
}

namespace {

// cartan[i][j] = <alpha_i, alpha_j^vee>, Bourbaki numbering throughout.
std::vector<std::vector<int>> cartan_matrix(RootSystemType t) {
    int n = t.rank;
    std::vector<std::vector<int>> c(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) c[i][i] = 2;
    auto link = [&](int i, int j, int cij, int cji) {
        c[i][j] = cij;
        c[j][i] = cji;
    };
    auto chain = [&](int upto) {
        for (int i = 0; i + 1 < upto; ++i) link(i, i + 1, -1, -1);
    };
    switch (t.family) {
        case RootFamily::A:
            chain(n);
            break;
        case RootFamily::B:  // alpha_n short
            chain(n - 1);
            if (n >= 2) link(n - 2, n - 1, -2, -1);
            break;
        case RootFamily::C:  // alpha_n long
            chain(n - 1);
            link(n - 2, n - 1, -1, -2);
            break;
        case RootFamily::D:
            chain(n - 1);
            link(n - 3, n - 1, -1, -1);
            break;
        case RootFamily::E: {
            // node 2 hangs off node 4; the rest is the chain 1-3-4-5-6(-7)(-8)
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            for (int i = 2; i + 1 < n; ++i) link(i, i + 1, -1, -1);
            break;
        }
        case RootFamily::F:  // alpha_1, alpha_2 long; alpha_3, alpha_4 short
            link(0, 1, -1, -1);
            link(1, 2, -2, -1);
            link(2, 3, -1, -1);
            break;
        case RootFamily::G:  // alpha_1 short, alpha_2 long
            link(0, 1, -1, -3);
            break;
    }
    return c;
}

int height(const RootCoeffs& v) {
    return std::accumulate(v.begin(), v.end(), 0);
}

}  // namespace

bool RootSystem::is_root(const RootCoeffs& v) const {
    bool nonneg = true, nonpos = true;
    for (int c : v) {
        if (c > 0) nonpos = false;
        if (c < 0) nonneg = false;
    }
    if (nonneg) return positive_set.count(v) > 0;
    if (nonpos) {
        RootCoeffs neg(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
        return positive_set.count(neg) > 0;
    }
    return false;
}

int RootSystem::height_of(int idx) const {
    return height(positive[idx]);
}

RootSystem build_root_system(RootSystemType t) {
    if (!admissible_type(t))
        throw std::invalid_argument("inadmissible root system type " + type_name(t));
    int n = t.rank;

    RootSystem rs;
    rs.type = t;
    rs.cartan = cartan_matrix(t);

    // Reflection closure: saturate the simple roots under all simple
    // reflections. Every root appears because the Weyl group acts
    // transitively on roots of a given length.
    std::unordered_set<RootCoeffs, VecHash> seen;
    std::deque<RootCoeffs> queue;
    for (int i = 0; i < n; ++i) {
        RootCoeffs e(n, 0);
        e[i] = 1;
        seen.insert(e);
        queue.push_back(std::move(e));
    }
    while (!queue.empty()) {
        RootCoeffs v = std::move(queue.front());
        queue.pop_front();
        for (int j = 0; j < n; ++j) {
            int pairing = 0;
            for (int i = 0; i < n; ++i) pairing += v[i] * rs.cartan[i][j];
            RootCoeffs w = v;
            w[j] -= pairing;
            if (seen.insert(w).second) queue.push_back(std::move(w));
        }
    }

    for (const auto& v : seen) {
        if (std::all_of(v.begin(), v.end(), [](int c) { return c >= 0; }))
            rs.positive.push_back(v);
    }
    std::sort(rs.positive.begin(), rs.positive.end(), [](const RootCoeffs& a, const RootCoeffs& b) {
        int ha = height(a), hb = height(b);
        if (ha != hb) return ha < hb;
        return a < b;
    });
    rs.positive_set.insert(rs.positive.begin(), rs.positive.end());
    rs.highest = static_cast<int>(rs.positive.size()) - 1;

    if (static_cast<int>(rs.positive.size()) != positive_root_count(t))
        throw std::logic_error("reflection closure produced " + std::to_string(rs.positive.size()) +
                               " positive roots for " + type_name(t) + ", expected " +
                               std::to_string(positive_root_count(t)));
    return rs;
}

const RootCoeffs& highest_root(const RootSystem& rs) {
    return rs.positive[rs.highest];
}

bool strongly_orthogonal(const RootSystem& rs, int a, int b) {
    if (a == b) return false;
    const RootCoeffs& va = rs.positive[a];
    const RootCoeffs& vb = rs.positive[b];
    RootCoeffs sum(va.size()), diff(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
        sum[i] = va[i] + vb[i];
        diff[i] = va[i] - vb[i];
    }
    return !rs.is_root(sum) && !rs.is_root(diff);
}

bool is_strong_orthogonal_system(const RootSystem& rs, const StrongOrthSystem& sos) {
    for (std::size_t i = 0; i < sos.size(); ++i)
        for (std::size_t j = i + 1; j < sos.size(); ++j)
            if (!strongly_orthogonal(rs, sos[i], sos[j])) return false;
    return true;
}

WeightVec root_sum(const RootSystem& rs, const StrongOrthSystem& sos) {
    WeightVec w(rs.type.rank, Rat(0));
    for (int idx : sos) {
        const RootCoeffs& v = rs.positive[idx];
        for (int i = 0; i < rs.type.rank; ++i) w[i] += Rat(v[i]);
    }
    return w;
}

namespace {

struct CliqueSearch {
    const RootSystem& rs;
    int rank;
    std::vector<std::vector<char>> adj;  // strong-orthogonality graph
    std::vector<int> order;              // vertices by decreasing height
    std::vector<int> weight;             // height per vertex
    std::vector<int> best;
    long best_w = -1;

    explicit CliqueSearch(const RootSystem& r) : rs(r), rank(r.type.rank) {
        int n = static_cast<int>(rs.positive.size());
        adj.assign(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                adj[i][j] = adj[j][i] = strongly_orthogonal(rs, i, j) ? 1 : 0;
        weight.resize(n);
        order.resize(n);
        for (int i = 0; i < n; ++i) {
            weight[i] = rs.height_of(i);
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return weight[a] > weight[b]; });
    }

    // Strongly orthogonal roots are mutually orthogonal, hence linearly
    // independent: no system exceeds the rank. The bound adds the largest
    // (rank - chosen) candidate weights to the current total.
    long bound(long cur, const std::vector<int>& cand, std::size_t chosen_size) const {
        long b = cur;
        std::size_t room = static_cast<std::size_t>(rank) - chosen_size;
        for (std::size_t k = 0; k < cand.size() && k < room; ++k) b += weight[cand[k]];
        return b;
    }

    void expand(std::vector<int>& chosen, long cur, const std::vector<int>& cand) {
        if (cur > best_w) {
            best_w = cur;
            best = chosen;
        }
        if (cand.empty() || chosen.size() == static_cast<std::size_t>(rank)) return;
        for (std::size_t k = 0; k < cand.size(); ++k) {
            std::vector<int> rest(cand.begin() + k, cand.end());
            if (bound(cur, rest, chosen.size()) <= best_w) return;
            int v = cand[k];
            std::vector<int> next;
            next.reserve(cand.size() - k);
            for (std::size_t m = k + 1; m < cand.size(); ++m)
                if (adj[v][cand[m]]) next.push_back(cand[m]);
            chosen.push_back(v);
            expand(chosen, cur + weight[v], next);
            chosen.pop_back();
        }
    }
};

}  // namespace

StrongOrthSystem dominant_strong_orthogonal_system(const RootSystem& rs) {
    CliqueSearch search(rs);
    std::vector<int> chosen;
    search.expand(chosen, 0, search.order);
    StrongOrthSystem out = search.best;
    std::sort(out.begin(), out.end());
    return out;
}

WeightVec spherical_decay_weight(const RootSystem& rs) {
    WeightVec rho = root_sum(rs, dominant_strong_orthogonal_system(rs));
    for (auto& c : rho) c = c * Rat(1, 2);
    return rho;
}

bool dominates_on_chamber(const WeightVec& f, const WeightVec& g) {
    if (f.size() != g.size())
        throw std::invalid_argument("dominates_on_chamber: mismatched ranks");
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] < g[i]) return false;
    return true;
}

bool strong_decay_type(RootSystemType t) {
    switch (t.family) {
        case RootFamily::B:
        case RootFamily::D: return t.rank >= 4;
        case RootFamily::E: return true;
        case RootFamily::F: return true;
        default: return false;
    }
}

WeightVec to_weight(const RootCoeffs& v) {
    WeightVec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = Rat(v[i]);
    return w;
}

WeightVec weight_sub(const WeightVec& f, const WeightVec& g) {
    WeightVec out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] - g[i];
    return out;
}

std::string root_system_to_json(const RootSystem& rs) {
    nlohmann::json j;
    j["type"] = type_name(rs.type);
    j["rank"] = rs.type.rank;
    j["cartan"] = rs.cartan;
    j["positive_roots"] = rs.positive;
    j["highest_root"] = rs.positive[rs.highest];
    StrongOrthSystem q = dominant_strong_orthogonal_system(rs);
    nlohmann::json qj = nlohmann::json::array();
    for (int idx : q) qj.push_back(rs.positive[idx]);
    j["dominant_orthogonal_system"] = qj;
    nlohmann::json xj = nlohmann::json::array();
    for (const Rat& c : spherical_decay_weight(rs)) xj.push_back(c.str());
    j["decay_weight"] = xj;
    return j.dump(2);
}

}  // namespace homflow
