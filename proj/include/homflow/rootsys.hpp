#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "homflow/rational.hpp"

namespace homflow {

// Irreducible reduced root systems in the Bourbaki numbering. Everything is
// done in simple-root coordinates with exact integer/rational arithmetic;
// no inner products are needed beyond the Cartan integers.

enum class RootFamily : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G' };

struct RootSystemType {
    RootFamily family;
    int rank;

    bool operator==(const RootSystemType&) const = default;
};

// Admissible (family, rank) pairs, one per isomorphism class:
// A_n n>=1, B_n n>=2, C_n n>=3, D_n n>=4, E_6..E_8, F_4, G_2.
bool admissible_type(RootSystemType t);

// Parse strings like "A2", "E8", "F4".
RootSystemType parse_type(const std::string& s);
std::string type_name(RootSystemType t);

// A root is its coefficient vector over the simple roots.
using RootCoeffs = std::vector<int>;

// Weight-lattice elements with rational simple-root coordinates.
using WeightVec = std::vector<Rat>;

struct VecHash {
    std::size_t operator()(const RootCoeffs& v) const {
        std::size_t h = 1469598103934665603ULL;
        for (int c : v) {
            h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

struct RootSystem {
    RootSystemType type;
    // cartan[i][j] = <alpha_i, alpha_j^vee>; the simple reflection s_j maps
    // a root with coefficients c to c' where c'_j = c_j - sum_i c_i cartan[i][j].
    std::vector<std::vector<int>> cartan;
    // All positive roots, sorted by (height, lexicographic); simple roots
    // are the rank vectors of height 1.
    std::vector<RootCoeffs> positive;
    int highest = -1;  // index into `positive`

    std::unordered_set<RootCoeffs, VecHash> positive_set;

    bool is_root(const RootCoeffs& v) const;
    int height_of(int idx) const;
};

// Build the full positive system by reflection closure of the simple roots.
// Throws std::invalid_argument for inadmissible types.
RootSystem build_root_system(RootSystemType t);

const RootCoeffs& highest_root(const RootSystem& rs);

// alpha and beta (indices into rs.positive) are strongly orthogonal when
// neither alpha+beta nor alpha-beta is a root.
bool strongly_orthogonal(const RootSystem& rs, int a, int b);

// A pairwise strongly orthogonal set of positive roots, stored as sorted
// indices into rs.positive.
using StrongOrthSystem = std::vector<int>;

bool is_strong_orthogonal_system(const RootSystem& rs, const StrongOrthSystem& sos);

// Sum of the member roots, as an integer weight vector.
WeightVec root_sum(const RootSystem& rs, const StrongOrthSystem& sos);

// The strongly orthogonal system whose root sum dominates the root sum of
// every other strongly orthogonal system coefficientwise. Existence is a
// theorem; this finds it by exact branch-and-bound maximization of the total
// height (any total-height maximizer attains the dominant sum).
StrongOrthSystem dominant_strong_orthogonal_system(const RootSystem& rs);

// xi = half the dominant root sum. Controls the uniform decay rate of
// spherical matrix coefficients: the decay envelope is exp(-xi) on the
// positive chamber.
WeightVec spherical_decay_weight(const RootSystem& rs);

// f(X) >= g(X) for every X in the closed positive Weyl chamber, i.e. f - g
// has nonnegative coefficients in the simple-root basis.
bool dominates_on_chamber(const WeightVec& f, const WeightVec& g);

// Types whose decay weight dominates the highest root on the chamber:
// B_n (n>=4), D_n (n>=4), E6, E7, E8, F4. For these the matrix-coefficient
// decay along a unipotent flow gains a factor-two exponent.
bool strong_decay_type(RootSystemType t);

// Closed-form number of positive roots.
int positive_root_count(RootSystemType t);

// JSON round-trip (nlohmann grammar) for tooling.
std::string root_system_to_json(const RootSystem& rs);

WeightVec to_weight(const RootCoeffs& v);
WeightVec weight_sub(const WeightVec& f, const WeightVec& g);

}  // namespace homflow
