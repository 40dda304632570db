#pragma once

// Concrete homogeneous dynamics on X = SL_2(Z) \ SL_2(R): fundamental-domain
// reduction with an integer witness, Haar sampling, one-parameter flows,
// spherical targets with exact measures, and a fast orbit walker for long
// Monte Carlo runs.
//
// Conventions.  G acts on the upper half plane by Mobius transformations
// g.z = (az + b)/(cz + d); the coset Gamma g corresponds to the unimodular
// row lattice Z^2 g.  The fundamental domain is F = {|Re z| <= 1/2, |z| >= 1}
// with the left edge and left arc kept (Re z = 1/2 and the arc with
// Re z > 0 map to the opposite side), so reduction is a true function.
// Frames are projective: theta in [0, pi), quotienting by -I.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "homflow/liealg.hpp"
#include "homflow/rng.hpp"

namespace homflow {

using Cplx = std::complex<double>;

// 2 x 2 real matrix with determinant 1 (within 1e-10).
struct GroupElement {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    GroupElement times(const GroupElement& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    GroupElement inverse() const { return {d, -b, -c, a}; }  // det = 1
    Cplx mobius(Cplx z) const { return (a * z + b) / (c * z + d); }
    // Rescales the entries so det returns to exactly 1 (drift correction for
    // long orbits; requires det > 0).
    void renormalize();
};

// Integer matrix in SL_2(Z); the reduction witness.
struct IntMat {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    std::int64_t det() const { return a * d - b * c; }
    IntMat times(const IntMat& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    IntMat inverse() const { return {d, -b, -c, a}; }  // det = 1
    GroupElement real() const { return {double(a), double(b), double(c), double(d)}; }
    bool operator==(const IntMat& o) const = default;
};

// A point of X: the reduced representative rep (rep . i lies in F) together
// with the reducing witness gamma in SL_2(Z), rep = gamma * (original
// element).  z and theta are derived views of rep.
struct CosetPoint {
    GroupElement rep;
    IntMat witness;

    Cplx z() const { return rep.mobius(Cplx(0, 1)); }
    double theta() const;  // frame angle in [0, pi)
};

// n(x) a(y) k(theta): the element sending i to x + iy with frame angle theta.
GroupElement nak(Cplx z, double theta);

// Fundamental-domain reduction by alternating translations T^n and
// inversions S; tracks the witness.  Throws on non-unimodular input.
CosetPoint reduce(const GroupElement& g);

// One sample from the normalized hyperbolic measure (3/pi) dx dy / y^2 on F:
// x uniform, y by inverse CDF of 1/y^2 on [sqrt(3)/2, inf), rejection on
// |z| < 1; theta uniform on [0, pi).
CosetPoint haar_sample(Xoshiro256pp& rng);

// d(x, x0) concretized as max(0, log Im z) of the reduced representative;
// mu({d > t}) = (3/pi) e^{-t} exactly, so the cusp decay rate is 1.
double cusp_distance(const CosetPoint& x);

// ------------------------------------------------------------------ flows

struct FlowSpec {
    enum class Kind { Geodesic, Horocycle, Custom };
    Kind kind = Kind::Horocycle;
    GroupElement step;         // time-1 map h_1 = exp(X0)
    FlowDescriptor descriptor; // generator's Jordan type (custom: validated)

    static FlowSpec geodesic();   // h_1 = diag(e^{1/2}, e^{-1/2})
    static FlowSpec horocycle();  // h_1 = [[1, 1], [0, 1]]
    // 2 x 2 traceless generator, validated through the flow classifier;
    // throws when the generator is zero (bounded flows make no orbit).
    static FlowSpec custom(const Mat& generator);

    std::string name() const;
    // h_m by binary powering with a final determinant correction; m >= 0.
    // Diagonal entries overflow near m ~ 700 for the geodesic: long flows
    // must go through flow_step / OrbitWalker, which interleave reduction.
    GroupElement step_pow(long long m) const;
};

// x h_m, reduced.  Large m is processed in chunks with intermediate
// reductions so diagonalizable flows cannot overflow.
CosetPoint flow_step(const CosetPoint& x, const FlowSpec& flow, long long m);

// ---------------------------------------------------------------- targets

// One-parameter spherical target family B_t with mu(B_t) = (3/pi) e^{-t}:
// cusp neighborhoods {d > t}, or shrinking balls around a fixed center with
// radius chosen to give the same measure law.  Membership ignores the frame
// angle (targets live on the surface).
struct TargetFamily {
    enum class Kind { CuspNeighborhood, ShrinkingBall };
    Kind kind = Kind::CuspNeighborhood;
    Cplx center = Cplx(0.0, 1.5);  // ball kind only

    static TargetFamily cusp();
    static TargetFamily ball(Cplx center);

    double varkappa() const { return 1.0; }  // -log mu(B_t) / t -> 1
    // Exact measure (3/pi) e^{-t}, t >= 0.  Ball kind throws domain_error
    // when the ball at level t is not contained in the fundamental domain
    // (no closed form; use measure_mc).
    double measure(double t) const;
    // Inverse of measure; requires 0 < mu <= 3/pi.
    double t_for_measure(double mu) const;
    // Monte Carlo estimate (value, standard error) for ball targets that may
    // overlap the domain boundary.
    std::pair<double, double> measure_mc(double t, Xoshiro256pp& rng, int n_samples) const;

    bool contains(const CosetPoint& x, double t) const;
    bool contains_z(Cplx z_reduced, double t) const;

    // Hyperbolic ball radius at level t: mu = 12 sinh^2(r/2).
    double ball_radius(double t) const;
    // Hyperbolic distance from the ball center to the domain boundary.
    double boundary_margin() const;
};

// Does x h_m land in B_t?
bool hit(const CosetPoint& x, const TargetFamily& fam, double t, const FlowSpec& flow,
         long long m);

// Smallest m with exactly i cumulative hits of B_t along x h_1, ..., x h_m;
// exceeded = true when the budget m_max runs out first.
struct HittingTime {
    long long m = 0;
    bool exceeded = false;
};
HittingTime hitting_time(const CosetPoint& x, const TargetFamily& fam, double t,
                         const FlowSpec& flow, int i, long long m_max);

// ------------------------------------------------------------ fast walker

// Long-orbit engine: the coset as a row lattice basis, kept Lagrange-reduced
// so the shortest vector (hence the reduced height 1 / |shortest|^2) is
// always at hand.  One step costs a handful of flops; the determinant is
// re-corrected every 1024 steps.
class OrbitWalker {
  public:
    explicit OrbitWalker(const CosetPoint& x);

    void step(const FlowSpec& flow);
    long long steps() const { return steps_; }

    // |shortest lattice vector|^2 = 1 / Im(reduced z).
    double shortest_sq();
    double height() { return 1.0 / shortest_sq(); }
    double cusp_dist();
    // The F-representative of the current coset.
    Cplx reduced_z();
    // A representative matrix of the current coset (basis rows).
    GroupElement current() const { return {r1x_, r1y_, r2x_, r2y_}; }

  private:
    void lagrange();
    void maybe_renormalize();
    double r1x_, r1y_, r2x_, r2y_;  // basis rows (r1x, r1y), (r2x, r2y); det +1
    long long steps_ = 0;
    int since_renorm_ = 0;
};

// ------------------------------------------------------------------- JSON

// {"z_re": .., "z_im": .., "theta": .., "witness": [[a, b], [c, d]]}
std::string point_to_json(const CosetPoint& x);
CosetPoint point_from_json(const std::string& text);

// CSV rows m, z_re, z_im, cusp_distance along the orbit, every `stride`
// steps up to m_max (header row included).
std::string orbit_to_csv(const CosetPoint& start, const FlowSpec& flow, long long m_max,
                         long long stride);

// Hyperbolic distance on the upper half plane.
double hyperbolic_distance(Cplx z, Cplx w);

// True when z and w are the same point of the modular surface up to the
// boundary identifications of F, within tol in hyperbolic distance.
bool same_surface_point(Cplx z, Cplx w, double tol);

}  // namespace homflow
