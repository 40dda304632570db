#include "homflow/modsurface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace homflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDetTol = 1e-10;

void check_unimodular(const GroupElement& g) {
    if (!(std::abs(g.det() - 1.0) <= kDetTol))
        throw std::invalid_argument("group element must have determinant 1, got det = " +
                                    std::to_string(g.det()));
}

double sinhc(double w) {  // sinh(w)/w, stable near 0
    return (std::abs(w) < 1e-4) ? 1.0 + w * w / 6.0 : std::sinh(w) / w;
}
double sinc(double w) { return (std::abs(w) < 1e-4) ? 1.0 - w * w / 6.0 : std::sin(w) / w; }

}  // namespace

void GroupElement::renormalize() {
    const double dt = det();
    if (!(dt > 0) || !std::isfinite(dt))
        throw std::runtime_error("cannot renormalize: determinant " + std::to_string(dt));
    const double s = 1.0 / std::sqrt(dt);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
}

GroupElement nak(Cplx z, double theta) {
    const double x = z.real(), y = z.imag();
    if (!(y > 0)) throw std::invalid_argument("nak: point must be in the upper half plane");
    const double sy = std::sqrt(y);
    const double cs = std::cos(theta), sn = std::sin(theta);
    return {sy * cs + (x / sy) * sn, -sy * sn + (x / sy) * cs, sn / sy, cs / sy};
}

double CosetPoint::theta() const {
    const double y = z().imag();
    const double sy = std::sqrt(y);
    // k = a(y)^{-1} n(x)^{-1} rep is a rotation; read the angle off its
    // bottom row (sin theta, cos theta) * (1/sy scaling already applied).
    const double k21 = rep.c * sy;
    const double k22 = rep.d * sy;
    double th = std::atan2(k21, k22);
    if (th < 0) th += kPi;
    if (th >= kPi) th -= kPi;
    return th;
}

CosetPoint reduce(const GroupElement& g) {
    check_unimodular(g);
    GroupElement m = g;
    IntMat w;
    const int kMaxIter = 100000;
    int it = 0;
    for (; it < kMaxIter; ++it) {
        Cplx z = m.mobius(Cplx(0, 1));
        const double n = std::floor(z.real() + 0.5);
        if (n != 0) {
            // T^{-n} on the left: row1 -= n * row2.
            m.a -= n * m.c;
            m.b -= n * m.d;
            w.a -= std::llround(n) * w.c;
            w.b -= std::llround(n) * w.d;
            z -= n;
        }
        if (std::norm(z) < 1.0 - 1e-13) {
            // S on the left: (row1, row2) <- (-row2, row1).
            m = GroupElement{-m.c, -m.d, m.a, m.b};
            w = IntMat{-w.c, -w.d, w.a, w.b};
            continue;  // each inversion strictly increases Im z
        }
        break;
    }
    if (it == kMaxIter) throw std::runtime_error("fundamental-domain reduction did not terminate");

    // Boundary convention: keep the left edge and the left arc.
    Cplx z = m.mobius(Cplx(0, 1));
    if (z.real() >= 0.5 - 1e-13) {
        m.a -= m.c;
        m.b -= m.d;
        w.a -= w.c;
        w.b -= w.d;
        z -= 1.0;
    }
    if (std::norm(z) <= 1.0 + 1e-13 && z.real() > 1e-13) {
        m = GroupElement{-m.c, -m.d, m.a, m.b};
        w = IntMat{-w.c, -w.d, w.a, w.b};
    }
    return CosetPoint{m, w};
}

CosetPoint haar_sample(Xoshiro256pp& rng) {
    const double y0 = std::sqrt(3.0) / 2.0;
    double x = 0, y = 0;
    for (;;) {
        x = rng.uniform() - 0.5;
        y = y0 / (1.0 - rng.uniform());  // inverse CDF of 1/y^2 on [y0, inf)
        if (x * x + y * y >= 1.0) break;
    }
    const double theta = rng.uniform() * kPi;
    return CosetPoint{nak(Cplx(x, y), theta), IntMat{}};
}

double cusp_distance(const CosetPoint& x) {
    const double y = x.z().imag();
    return y > 1.0 ? std::log(y) : 0.0;
}

// ------------------------------------------------------------------ flows

FlowSpec FlowSpec::geodesic() {
    FlowSpec f;
    f.kind = Kind::Geodesic;
    const double e = std::exp(0.5);
    f.step = {e, 0, 0, 1.0 / e};
    Mat gen(2, 2);
    gen << 0.5, 0, 0, -0.5;
    f.descriptor = classify_flow(make_sl(2, gen));
    return f;
}

FlowSpec FlowSpec::horocycle() {
    FlowSpec f;
    f.kind = Kind::Horocycle;
    f.step = {1, 1, 0, 1};
    Mat gen(2, 2);
    gen << 0, 1, 0, 0;
    f.descriptor = classify_flow(make_sl(2, gen));
    return f;
}

FlowSpec FlowSpec::custom(const Mat& generator) {
    if (generator.rows() != 2 || generator.cols() != 2)
        throw std::invalid_argument("custom flow generator must be 2 x 2");
    FlowSpec f;
    f.kind = Kind::Custom;
    f.descriptor = classify_flow(make_sl(2, generator));
    if (generator.norm() == 0.0)
        throw std::invalid_argument("custom flow generator must be nonzero");
    // exp of a traceless 2 x 2: X^2 = (p^2 + qr) I.
    const double p = generator(0, 0), q = generator(0, 1), r = generator(1, 0);
    const double delta = p * p + q * r;
    double ch, shc;  // cosh(w), sinh(w)/w for w = sqrt(delta)
    if (delta >= 0) {
        const double wv = std::sqrt(delta);
        ch = std::cosh(wv);
        shc = sinhc(wv);
    } else {
        const double wv = std::sqrt(-delta);
        ch = std::cos(wv);
        shc = sinc(wv);
    }
    f.step = {ch + shc * p, shc * q, shc * r, ch - shc * p};
    f.step.renormalize();
    return f;
}

std::string FlowSpec::name() const {
    switch (kind) {
        case Kind::Geodesic: return "geodesic";
        case Kind::Horocycle: return "horocycle";
        case Kind::Custom: return "custom";
    }
    return "?";
}

GroupElement FlowSpec::step_pow(long long m) const {
    if (m < 0) throw std::invalid_argument("flow time must be nonnegative");
    if (kind == Kind::Horocycle) return {1, double(m), 0, 1};
    if (kind == Kind::Geodesic) {
        const double e = std::exp(0.5 * double(m));
        return {e, 0, 0, 1.0 / e};
    }
    GroupElement acc;  // identity
    GroupElement base = step;
    long long k = m;
    while (k > 0) {
        if (k & 1) {
            acc = acc.times(base);
            acc.renormalize();
        }
        base = base.times(base);
        base.renormalize();
        k >>= 1;
    }
    return acc;
}

namespace {

// Witness words for diagonalizable flows grow like exp(m/2); refuse to wrap
// around instead of silently corrupting the integer matrix.
constexpr std::int64_t kWitnessCap = std::int64_t(1) << 61;

std::int64_t checked_fma2(std::int64_t a, std::int64_t b, std::int64_t c,
                          std::int64_t d) {
    const __int128 v = (__int128)a * b + (__int128)c * d;
    if (v > kWitnessCap || v < -kWitnessCap)
        throw std::overflow_error(
            "witness entries exceed the 64-bit range; use OrbitWalker for long orbits");
    return (std::int64_t)v;
}

IntMat checked_times(const IntMat& l, const IntMat& r) {
    return {checked_fma2(l.a, r.a, l.b, r.c), checked_fma2(l.a, r.b, l.b, r.d),
            checked_fma2(l.c, r.a, l.d, r.c), checked_fma2(l.c, r.b, l.d, r.d)};
}

}  // namespace

CosetPoint flow_step(const CosetPoint& x, const FlowSpec& flow, long long m) {
    if (m < 0) throw std::invalid_argument("flow time must be nonnegative");
    // Step and reduce one unit at a time: reduction must happen while the
    // representative is well conditioned, or the short lattice vector is lost
    // to cancellation under hyperbolic stretching.
    CosetPoint cur = x;
    for (long long s = 1; s <= m; ++s) {
        CosetPoint nxt = reduce(cur.rep.times(flow.step));
        nxt.witness = checked_times(nxt.witness, cur.witness);
        cur = nxt;
        if (s % 1000 == 0) cur.rep.renormalize();
    }
    return cur;
}

// ---------------------------------------------------------------- targets

TargetFamily TargetFamily::cusp() { return TargetFamily{}; }

TargetFamily TargetFamily::ball(Cplx center) {
    if (!(std::abs(center.real()) < 0.5 && std::norm(center) > 1.0))
        throw std::invalid_argument("ball center must lie in the open fundamental domain");
    TargetFamily f;
    f.kind = Kind::ShrinkingBall;
    f.center = center;
    return f;
}

double TargetFamily::ball_radius(double t) const {
    const double mu = (3.0 / kPi) * std::exp(-t);
    return 2.0 * std::asinh(std::sqrt(mu / 12.0));
}

double TargetFamily::boundary_margin() const {
    const double x = center.real(), y = center.imag();
    const double to_right = std::asinh(std::abs(x - 0.5) / y);
    const double to_left = std::asinh(std::abs(x + 0.5) / y);
    // Distance to the unit-circle geodesic: map it to the imaginary axis by
    // z -> (z - 1)/(z + 1).
    const Cplx w = (center - 1.0) / (center + 1.0);
    const double to_arc = std::asinh(std::abs(w.real()) / w.imag());
    return std::min({to_right, to_left, to_arc});
}

double TargetFamily::measure(double t) const {
    if (t < 0) throw std::invalid_argument("target level t must be nonnegative");
    if (kind == Kind::ShrinkingBall) {
        const double r = ball_radius(t);
        if (r > boundary_margin() - 1e-12)
            throw std::domain_error(
                "ball target overlaps the fundamental-domain boundary; no closed form "
                "(use measure_mc)");
    }
    return (3.0 / kPi) * std::exp(-t);
}

double TargetFamily::t_for_measure(double mu) const {
    if (!(mu > 0 && mu <= 3.0 / kPi + 1e-15))
        throw std::invalid_argument("target measure must lie in (0, 3/pi]");
    // Pure inversion of the decay law; containment is checked by measure().
    return std::max(0.0, std::log((3.0 / kPi) / mu));
}

namespace {

// Images of a fundamental-domain point under the nearby group elements;
// enough to measure quotient distances for small balls.
std::vector<Cplx> nearby_images(Cplx c) {
    std::vector<Cplx> out;
    for (int k = -1; k <= 1; ++k) {
        const Cplx ck = c + double(k);
        out.push_back(ck);
        const Cplx s = -1.0 / ck;
        for (int j = -1; j <= 1; ++j) out.push_back(s + double(j));
    }
    return out;
}

}  // namespace

double hyperbolic_distance(Cplx z, Cplx w) {
    const double num = std::norm(z - w);
    return std::acosh(1.0 + num / (2.0 * z.imag() * w.imag()));
}

bool same_surface_point(Cplx z, Cplx w, double tol) {
    for (const Cplx& img : nearby_images(w))
        if (img.imag() > 0 && hyperbolic_distance(z, img) <= tol) return true;
    return false;
}

std::pair<double, double> TargetFamily::measure_mc(double t, Xoshiro256pp& rng,
                                                   int n_samples) const {
    if (n_samples < 1) throw std::invalid_argument("measure_mc needs at least one sample");
    long long hits = 0;
    for (int i = 0; i < n_samples; ++i)
        if (contains_z(haar_sample(rng).z(), t)) ++hits;
    const double p = double(hits) / double(n_samples);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / double(n_samples));
    return {p, se};
}

bool TargetFamily::contains_z(Cplx z_reduced, double t) const {
    if (kind == Kind::CuspNeighborhood) return z_reduced.imag() > std::exp(t);
    const double r = ball_radius(t);
    for (const Cplx& img : nearby_images(center))
        if (img.imag() > 0 && hyperbolic_distance(z_reduced, img) <= r) return true;
    return false;
}

bool TargetFamily::contains(const CosetPoint& x, double t) const {
    return contains_z(x.z(), t);
}

bool hit(const CosetPoint& x, const TargetFamily& fam, double t, const FlowSpec& flow,
         long long m) {
    return fam.contains(flow_step(x, flow, m), t);
}

HittingTime hitting_time(const CosetPoint& x, const TargetFamily& fam, double t,
                         const FlowSpec& flow, int i, long long m_max) {
    if (i < 1) throw std::invalid_argument("hit index must be at least 1");
    if (m_max < 1) throw std::invalid_argument("hitting-time budget must be at least 1");
    OrbitWalker walker(x);
    const bool cusp = fam.kind == TargetFamily::Kind::CuspNeighborhood;
    const double thr = cusp ? std::exp(-t) : 0.0;  // Im > e^t <=> |shortest|^2 < e^-t
    int count = 0;
    for (long long m = 1; m <= m_max; ++m) {
        walker.step(flow);
        const bool in = cusp ? (walker.shortest_sq() < thr)
                             : fam.contains_z(walker.reduced_z(), t);
        if (in && ++count == i) return {m, false};
    }
    return {m_max, true};
}

// ------------------------------------------------------------ fast walker

OrbitWalker::OrbitWalker(const CosetPoint& x)
    : r1x_(x.rep.a), r1y_(x.rep.b), r2x_(x.rep.c), r2y_(x.rep.d) {
    check_unimodular(x.rep);
}

void OrbitWalker::step(const FlowSpec& flow) {
    switch (flow.kind) {
        case FlowSpec::Kind::Horocycle:
            // right multiplication by [[1,1],[0,1]]: (u, v) -> (u, u + v)
            r1y_ += r1x_;
            r2y_ += r2x_;
            break;
        case FlowSpec::Kind::Geodesic: {
            static const double e = std::exp(0.5), ei = std::exp(-0.5);
            r1x_ *= e;
            r1y_ *= ei;
            r2x_ *= e;
            r2y_ *= ei;
            break;
        }
        case FlowSpec::Kind::Custom: {
            const GroupElement& s = flow.step;
            const double n1x = r1x_ * s.a + r1y_ * s.c, n1y = r1x_ * s.b + r1y_ * s.d;
            const double n2x = r2x_ * s.a + r2y_ * s.c, n2y = r2x_ * s.b + r2y_ * s.d;
            r1x_ = n1x;
            r1y_ = n1y;
            r2x_ = n2x;
            r2y_ = n2y;
            break;
        }
    }
    ++steps_;
    // Reduce inline: the basis must stay short while the flow stretches it,
    // or cancellation destroys the short vector within a few dozen steps.
    lagrange();
    if (++since_renorm_ >= 1024) maybe_renormalize();
}

void OrbitWalker::maybe_renormalize() {
    since_renorm_ = 0;
    const double dt = r1x_ * r2y_ - r1y_ * r2x_;
    if (!(dt > 0) || !std::isfinite(dt))
        throw std::runtime_error("orbit walker drift: determinant " + std::to_string(dt));
    const double s = 1.0 / std::sqrt(dt);
    r1x_ *= s;
    r1y_ *= s;
    r2x_ *= s;
    r2y_ *= s;
}

void OrbitWalker::lagrange() {
    for (int it = 0; it < 64; ++it) {
        double n1 = r1x_ * r1x_ + r1y_ * r1y_;
        const double n2 = r2x_ * r2x_ + r2y_ * r2y_;
        if (n1 > n2) {
            // Swap rows, negating one to keep the determinant at +1.
            std::swap(r1x_, r2x_);
            std::swap(r1y_, r2y_);
            r1x_ = -r1x_;
            r1y_ = -r1y_;
            n1 = n2;
        }
        const double mu = std::round((r1x_ * r2x_ + r1y_ * r2y_) / n1);
        if (mu == 0) break;
        r2x_ -= mu * r1x_;
        r2y_ -= mu * r1y_;
    }
}

double OrbitWalker::shortest_sq() {
    lagrange();
    return r1x_ * r1x_ + r1y_ * r1y_;
}

double OrbitWalker::cusp_dist() {
    const double s = shortest_sq();
    return s < 1.0 ? -std::log(s) : 0.0;
}

Cplx OrbitWalker::reduced_z() {
    lagrange();
    // Matrix with bottom row = shortest vector, top row = minus the other
    // basis row so the determinant is +1; its Mobius image of i is reduced
    // up to a horizontal translation.
    Cplx z = Cplx(-r2y_, -r2x_) / Cplx(r1y_, r1x_);
    z -= std::floor(z.real() + 0.5);
    if (z.real() >= 0.5 - 1e-13) z -= 1.0;
    if (std::norm(z) <= 1.0 + 1e-13 && z.real() > 1e-13) {
        z = -1.0 / z;
        z -= std::floor(z.real() + 0.5);
    }
    return z;
}

// ------------------------------------------------------------------- JSON

std::string point_to_json(const CosetPoint& x) {
    nlohmann::json j;
    const Cplx z = x.z();
    j["z_re"] = z.real();
    j["z_im"] = z.imag();
    j["theta"] = x.theta();
    j["witness"] = {{x.witness.a, x.witness.b}, {x.witness.c, x.witness.d}};
    return j.dump();
}

CosetPoint point_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("point JSON: ") + e.what());
    }
    const double re = j.at("z_re").get<double>();
    const double im = j.at("z_im").get<double>();
    const double theta = j.at("theta").get<double>();
    if (!(im > 0)) throw std::invalid_argument("point JSON: z must be in the upper half plane");
    if (std::abs(re) > 0.5 + 1e-9 || re * re + im * im < 1.0 - 1e-9)
        throw std::invalid_argument("point JSON: z must lie in the fundamental domain");
    const auto& w = j.at("witness");
    if (!w.is_array() || w.size() != 2 || w[0].size() != 2 || w[1].size() != 2)
        throw std::invalid_argument("point JSON: witness must be a 2 x 2 integer matrix");
    IntMat g{w[0][0].get<std::int64_t>(), w[0][1].get<std::int64_t>(),
             w[1][0].get<std::int64_t>(), w[1][1].get<std::int64_t>()};
    if (g.det() != 1) throw std::invalid_argument("point JSON: witness determinant must be 1");
    return CosetPoint{nak(Cplx(re, im), theta), g};
}

std::string orbit_to_csv(const CosetPoint& start, const FlowSpec& flow, long long m_max,
                         long long stride) {
    if (m_max < 0 || stride < 1)
        throw std::invalid_argument("orbit CSV needs m_max >= 0 and stride >= 1");
    std::ostringstream out;
    out << "m,z_re,z_im,cusp_distance\n";
    char buf[160];
    OrbitWalker walker(start);
    const Cplx z0 = start.z();
    std::snprintf(buf, sizeof buf, "0,%.12g,%.12g,%.12g\n", z0.real(), z0.imag(),
                  cusp_distance(start));
    out << buf;
    for (long long m = 1; m <= m_max; ++m) {
        walker.step(flow);
        if (m % stride == 0 || m == m_max) {
            const Cplx z = walker.reduced_z();
            const double d = walker.cusp_dist();
            std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g\n", m, z.real(), z.imag(), d);
            out << buf;
        }
    }
    return out.str();
}

}  // namespace homflow
