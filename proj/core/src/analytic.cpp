#include "hmf/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>

#include "hmf/residue.hpp"

namespace hmf {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kLatticeBudget = 5e7;
// per-sample cap the verification sampler enforces before evaluating
constexpr double kVerifyPointCap = 1.2e7;

std::atomic<int> g_threads{1};

struct EmbeddingData {
    int d;
    double w1, w2;  // embeddings of omega
    double covol;   // |w1 - w2| = sqrt(disc), covolume of R in the plane
    double gauge;   // Voronoi inflation radius for the point-count envelope
};

EmbeddingData embedding_data(int d) {
    FieldContext ctx = make_field(d);
    EmbeddingData e;
    e.d = d;
    auto w = embeddings(ctx.omega);
    e.w1 = w.first;
    e.w2 = w.second;
    e.covol = std::abs(e.w1 - e.w2);
    e.gauge = 1.5 + std::abs(e.w1) + std::abs(e.w2);
    return e;
}

Int floor_rat(const Rat& r) {
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return fl;
}

Int round_rat(const Rat& r) {
    Rat s = r + Rat(1, 2);
    s.canonicalize();
    return floor_rat(s);
}

Complex unit_circle(const Rat& turns) {
    Rat frac = turns - Rat(floor_rat(turns));
    frac.canonicalize();
    return std::polar(1.0, 2.0 * kPi * frac.get_d());
}

// coordinates of x in the integral basis (1, omega)
std::pair<Rat, Rat> integral_coords(const QuadVal& x) {
    if (x.d() % 4 == 1) {
        Rat b = x.v() * 2;
        Rat a = x.u() - x.v();
        a.canonicalize();
        b.canonicalize();
        return {a, b};
    }
    return {x.u(), x.v()};
}

QuadVal rat_val(int d, long num, long den = 1) { return QuadVal(d, Rat(num, den), Rat(0)); }

double sigma_double(const QuadVal& x, int which) {
    double root = std::sqrt(static_cast<double>(x.d()));
    double u = x.u().get_d(), v = x.v().get_d();
    return which == 1 ? u + v * root : u - v * root;
}

// |N(c z + d)|^{1/2}, the magnitude the automorphy factor is expected to have
double cocycle_scale_impl(const MatrixOverF& m, const UpperHalfPoint& z) {
    Complex f1 = sigma_double(m.c, 1) * z.z1 + sigma_double(m.d, 1);
    Complex f2 = sigma_double(m.c, 2) * z.z2 + sigma_double(m.d, 2);
    return std::sqrt(std::abs(f1) * std::abs(f2));
}

// Truncation plan for a Gaussian lattice sum with quadratic form
// Q(x) = a1 s1(x)^2 + a2 s2(x)^2. The number of lattice points with
// Q <= T is at most pi (sqrt(T/a1)+G)(sqrt(T/a2)+G)/covol: each point owns a
// Voronoi cell of diameter < G, so the inflated ellipse covers the cells.
// That envelope is <= ncap * T for T >= 1, and partial summation gives
//   tail(B) <= e^{-pi B} ncap ((B+1) g + 0.05 g^2),   g = 1/(1-e^{-pi}).
struct TruncationPlan {
    double cutoff;  // B
    double points;  // envelope count at T = B
};

TruncationPlan plan_lattice(const EmbeddingData& e, double a1, double a2, double abs_tol) {
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw ConvergenceError("lattice sum needs a positive definite form");
    if (!(abs_tol > 0.0)) throw ConvergenceError("tail target must be positive");
    double G = e.gauge;
    double ncap = kPi * (std::sqrt(1.0 / a1) + G) * (std::sqrt(1.0 / a2) + G) / e.covol;
    const double geo = 1.0 / (1.0 - std::exp(-kPi));
    double B = 2.0;
    if (ncap > abs_tol) B = std::max(B, std::log(ncap / abs_tol) / kPi);
    while (std::exp(-kPi * B) * ncap * ((B + 1.0) * geo + 0.05 * geo * geo) > abs_tol)
        B += 0.5;
    double points = kPi * (std::sqrt(B / a1) + G) * (std::sqrt(B / a2) + G) / e.covol;
    return {B, points};
}

// conj(chi(p + q omega)) addressable by integer residues of (p, q); the
// periods are the least positive steps along each coordinate axis that stay
// in the same residue class, so the hot loop needs no exact arithmetic
struct WeightTable {
    std::vector<Complex> vals;
    long pp = 1, pq = 1;

    Complex at(long p, long q) const {
        long i = p % pp;
        if (i < 0) i += pp;
        long j = q % pq;
        if (j < 0) j += pq;
        return vals[static_cast<size_t>(i) * static_cast<size_t>(pq) +
                    static_cast<size_t>(j)];
    }
};

WeightTable make_weight_table(const DirichletCharacter& chi) {
    DirichletCharacter prim = reduce_to_conductor(chi);
    const RingElement& m = prim.modulus;
    int d = m.d();
    FieldContext ctx = make_field(d);
    RingElement mw = m * ctx.omega;
    Int u0 = m.a(), u1 = m.b(), v0 = mw.a(), v1 = mw.b();
    Int det = abs(u0 * v1 - u1 * v0);
    Int g1 = gcd(Int(abs(u1)), Int(abs(v1)));
    Int g0 = gcd(Int(abs(u0)), Int(abs(v0)));
    Int ppz = det / g1, pqz = det / g0;
    if (ppz * pqz > (Int(1) << 22))
        throw ConvergenceError("character torus too large to tabulate");
    WeightTable table;
    table.pp = static_cast<long>(ppz.get_si());
    table.pq = static_cast<long>(pqz.get_si());

    ResidueRing ring(m);
    std::vector<Complex> by_residue(static_cast<size_t>(ring.size()));
    for (std::uint64_t i = 0; i < ring.size(); ++i)
        by_residue[static_cast<size_t>(i)] = char_eval(prim, ring.lift(i)).conj().embed();
    table.vals.resize(static_cast<size_t>(table.pp) * static_cast<size_t>(table.pq));
    for (long i = 0; i < table.pp; ++i)
        for (long j = 0; j < table.pq; ++j)
            table.vals[static_cast<size_t>(i) * table.pq + j] =
                by_residue[static_cast<size_t>(ring.reduce(RingElement(d, i, j)))];
    return table;
}

// sum over x = p + q omega in R of w(x) e(t x^2 z / 2) with the certified
// additive tail of plan_lattice; w is identically 1 when no table is given
Complex lattice_theta(const EmbeddingData& e, double t1, double t2, const UpperHalfPoint& z,
                      double abs_tol, const WeightTable* weight) {
    double y1 = z.z1.imag(), y2 = z.z2.imag();
    double x1 = z.z1.real(), x2 = z.z2.real();
    if (!(y1 > 0.0) || !(y2 > 0.0))
        throw ConvergenceError("lattice sum needs positive imaginary parts");
    double a1 = t1 * y1, a2 = t2 * y2;
    TruncationPlan plan = plan_lattice(e, a1, a2, abs_tol);
    if (plan.points > kLatticeBudget)
        throw ConvergenceError("lattice truncation budget exhausted");
    double B = plan.cutoff;
    double A = a1 + a2;
    double denom = a1 * a2 * (e.w1 - e.w2) * (e.w1 - e.w2);
    long qmax = static_cast<long>(std::sqrt(B * A / denom)) + 1;
    Complex acc(0.0, 0.0);
    for (long q = -qmax; q <= qmax; ++q) {
        double al = q * e.w1, be = q * e.w2;
        double center = -(a1 * al + a2 * be) / A;
        double rad2 = center * center - (a1 * al * al + a2 * be * be - B) / A;
        if (rad2 < 0.0) continue;
        double rad = std::sqrt(rad2);
        long plo = static_cast<long>(std::ceil(center - rad));
        long phi = static_cast<long>(std::floor(center + rad));
        for (long p = plo; p <= phi; ++p) {
            double s1 = p + al, s2 = p + be;
            double Q = a1 * s1 * s1 + a2 * s2 * s2;
            if (Q > B) continue;
            Complex w(1.0, 0.0);
            if (weight) {
                w = weight->at(p, q);
                if (w.real() == 0.0 && w.imag() == 0.0) continue;
            }
            double phase = kPi * (t1 * s1 * s1 * x1 + t2 * s2 * s2 * x2);
            acc += w * std::polar(std::exp(-kPi * Q), phase);
        }
    }
    return acc;
}

Complex theta_plain(const EmbeddingData& e, const UpperHalfPoint& z, double abs_tol) {
    return lattice_theta(e, 1.0, 1.0, z, abs_tol, nullptr);
}

Complex theta_weighted(const EmbeddingData& e, const WeightTable& table, const RingElement& t,
                       const UpperHalfPoint& z, double abs_tol) {
    auto ts = embeddings(t);
    return lattice_theta(e, ts.first, ts.second, z, abs_tol, &table);
}

// coset representatives of 2R inside delta^-1 R, as integer pairs (p, q)
// with v = (p + q omega)/delta: one rep per class of R modulo 2 delta R,
// read off a column-triangular basis of the sublattice
std::vector<std::pair<long, long>> half_different_cosets(const FieldContext& ctx) {
    RingElement two_delta = RingElement(ctx.d, 2, 0) * ctx.delta;
    RingElement td_omega = two_delta * ctx.omega;
    long m00 = mpz_class(two_delta.a()).get_si(), m10 = mpz_class(two_delta.b()).get_si();
    long m01 = mpz_class(td_omega.a()).get_si(), m11 = mpz_class(td_omega.b()).get_si();
    while (m01 != 0) {
        if (m00 == 0 || std::abs(m01) < std::abs(m00)) {
            std::swap(m00, m01);
            std::swap(m10, m11);
        }
        if (m01 == 0) break;
        long k = m01 / m00;
        m01 -= k * m00;
        m11 -= k * m10;
    }
    long h11 = std::abs(m00), h22 = std::abs(m11);
    std::vector<std::pair<long, long>> reps;
    reps.reserve(static_cast<size_t>(h11 * h22));
    for (long i = 0; i < h11; ++i)
        for (long j = 0; j < h22; ++j) reps.push_back({i, j});
    return reps;
}

// quadratic symbol of the extension F(sqrt c) at the ideal (a): product of
// local square indicators of c over the primes dividing (a) to odd order.
// Unit choices cancel, only valuations enter.
int quad_ideal_symbol(const RingElement& c_elem, const RingElement& a_elem) {
    int result = 1;
    for (const auto& [p, e] : factor(a_elem).primes) {
        if (e % 2 == 0) continue;
        int ls = is_local_square(c_elem, p);
        if (ls == 0) return 0;
        result *= ls;
    }
    return result;
}

RingElement small_element(int d, std::mt19937_64& gen, int radius, bool nonzero) {
    std::uniform_int_distribution<long> pick(-radius, radius);
    for (;;) {
        RingElement x(d, Int(pick(gen)), Int(pick(gen)));
        if (!nonzero || !x.is_zero()) return x;
    }
}

MatrixOverF upper_letter(const FieldContext& ctx, const RingElement& b) {
    MatrixOverF m = identity_matrix(ctx.d);
    m.b = rat_val(ctx.d, 2) / sigma1(ctx.delta) * sigma1(b);
    return m;
}

MatrixOverF lower_letter(const FieldContext& ctx, const RingElement& c, const RingElement& b) {
    MatrixOverF m = identity_matrix(ctx.d);
    m.c = sigma1(ctx.delta) * sigma1(c) / rat_val(ctx.d, 2) * sigma1(b);
    return m;
}

}  // namespace

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }

int thread_count() { return g_threads.load(); }

MatrixOverF identity_matrix(int d) {
    return {rat_val(d, 1), rat_val(d, 0), rat_val(d, 0), rat_val(d, 1)};
}

MatrixOverF mat_mul(const MatrixOverF& x, const MatrixOverF& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

QuadVal mat_det(const MatrixOverF& m) { return m.a * m.d - m.b * m.c; }

QuadVal field_value(const RingElement& x) { return sigma1(x); }

std::optional<RingElement> integral_value(const QuadVal& x) {
    auto [a, b] = integral_coords(x);
    if (a.get_den() != 1 || b.get_den() != 1) return std::nullopt;
    return RingElement(x.d(), Int(a.get_num()), Int(b.get_num()));
}

QuadVal conj_value(const QuadVal& x) { return QuadVal(x.d(), x.u(), -x.v()); }

bool in_gamma_group(const MatrixOverF& m, const QuadVal& f, const QuadVal& g) {
    if (!(mat_det(m) == rat_val(m.a.d(), 1))) return false;
    if (!integral_value(m.a) || !integral_value(m.d)) return false;
    if (!integral_value(m.b / f)) return false;
    if (g.is_zero()) return m.c.is_zero();
    return integral_value(m.c / g).has_value();
}

bool in_theta_group(const MatrixOverF& m) {
    int d = m.a.d();
    QuadVal delta = sigma1(make_field(d).delta);
    return in_gamma_group(m, rat_val(d, 2) / delta, rat_val(d, 2) * delta);
}

bool in_level_group(const MatrixOverF& m, const RingElement& c) {
    int d = c.d();
    QuadVal delta = sigma1(make_field(d).delta);
    return in_gamma_group(m, rat_val(d, 2) / delta, delta * sigma1(c) / rat_val(d, 2));
}

UpperHalfPoint apply_matrix(const MatrixOverF& m, const UpperHalfPoint& z) {
    // componentwise (az+b)/(cz+d) with the imaginary part taken from the
    // exact identity Im = det * y / |cz+d|^2; the direct complex division
    // cancels catastrophically when |cz+d| is large
    QuadVal det = mat_det(m);
    auto frac = [&](int which, Complex zz) {
        double a = sigma_double(m.a, which), b = sigma_double(m.b, which);
        double c = sigma_double(m.c, which), dd = sigma_double(m.d, which);
        double x = zz.real(), y = zz.imag();
        double q = (c * x + dd) * (c * x + dd) + c * c * y * y;
        double re = ((a * x + b) * (c * x + dd) + a * c * y * y) / q;
        double im = sigma_double(det, which) * y / q;
        return Complex(re, im);
    };
    return {frac(1, z.z1), frac(2, z.z2)};
}

double evaluation_floor() { return 0.5; }

Complex theta_eval(int d, const UpperHalfPoint& z, int precision) {
    if (z.y_min() < evaluation_floor())
        throw ConvergenceError("imaginary part below the evaluation floor");
    EmbeddingData e = embedding_data(d);
    return theta_plain(e, z, std::pow(10.0, -precision));
}

Complex theta_series_eval(const DirichletCharacter& chi, const RingElement& t,
                          const UpperHalfPoint& z, int precision) {
    if (!is_totally_positive(t)) throw PositivityError("shift must be totally positive");
    EmbeddingData e = embedding_data(t.d());
    WeightTable table = make_weight_table(chi);
    return theta_weighted(e, table, t, z, std::pow(10.0, -precision));
}

AutomorphyValue h_ratio(const MatrixOverF& gamma, const UpperHalfPoint& z, int precision) {
    int d = gamma.a.d();
    MatrixOverF w0 = w0_matrix(d);
    bool is_w0 = gamma.a == w0.a && gamma.b == w0.b && gamma.c == w0.c && gamma.d == w0.d;
    if (!is_w0 && !in_theta_group(gamma))
        throw MembershipError("matrix lies outside the theta group");
    EmbeddingData e = embedding_data(d);
    double tol = std::pow(10.0, -precision);
    double scale = cocycle_scale_impl(gamma, z);
    Complex num = theta_plain(e, apply_matrix(gamma, z), 0.3 * tol * std::max(1.0, scale));
    Complex den = theta_plain(e, z, 0.3 * tol);
    return {num / den, AutomorphyValue::Method::ratio};
}

Complex gauss_epsilon(int field_d, const RingElement& x) {
    if (x.is_zero()) throw DegenerateError("sign factor of zero requested");
    FieldContext ctx = make_field(field_d);
    QuadVal delta = sigma1(ctx.delta);
    QuadVal omega = sigma1(ctx.omega);
    QuadVal xv = sigma1(x);
    Complex sum(0.0, 0.0);
    for (auto [p, q] : half_different_cosets(ctx)) {
        QuadVal v = (rat_val(field_d, p) + rat_val(field_d, q) * omega) / delta;
        QuadVal w = -(v * v * xv) / rat_val(field_d, 4);
        Rat turns = w.u() * 2;  // trace of u + v sqrt(d) is 2u
        turns.canonicalize();
        sum += unit_circle(turns);
    }
    auto emb = embeddings(x);
    double disc = std::abs(mpz_class(ctx.discriminant).get_d());
    Complex eps = sum * 0.5 / std::sqrt(disc);
    eps *= std::polar(1.0, emb.first > 0 ? kPi / 4 : -kPi / 4);
    eps *= std::polar(1.0, emb.second > 0 ? kPi / 4 : -kPi / 4);
    int negs = (emb.first < 0 ? 1 : 0) + (emb.second < 0 ? 1 : 0);
    return eps * std::pow(Complex(0.0, 1.0), negs);
}

MatrixOverF w0_matrix(int d) {
    QuadVal delta = sigma1(make_field(d).delta);
    return {rat_val(d, 0), rat_val(d, -1) / delta, delta, rat_val(d, 0)};
}

Complex w0_reference(int d, const UpperHalfPoint& z) {
    double nd = std::abs(mpz_class(norm(make_field(d).delta)).get_d());
    Complex minus_i(0.0, -1.0);
    return std::sqrt(minus_i * z.z1) * std::sqrt(minus_i * z.z2) * std::sqrt(nd);
}

AutomorphyValue h_garrett(const MatrixOverF& gamma, const UpperHalfPoint& z) {
    int d = gamma.a.d();
    if (!in_theta_group(gamma)) throw MembershipError("matrix lies outside the theta group");
    if (gamma.c.is_zero())
        throw DegenerateError("triangular element: the factor is exactly 1");
    RingElement c_elem = *integral_value(gamma.c);
    RingElement d_elem = *integral_value(gamma.d);
    // extended quadratic symbol, fixed against the theta-ratio definition:
    // the ideal symbol at (d) times the Hilbert symbol (c, d)_v at each
    // infinite place. The lower-right entry is odd and coprime to the
    // lower-left one on the whole group, so the symbol never vanishes there.
    int sym = quad_ideal_symbol(c_elem, d_elem);
    if (sym == 0) throw SymbolError("quadratic symbol vanishes at the lower-right entry");
    auto ce = embeddings(c_elem);
    auto de = embeddings(d_elem);
    if (ce.first < 0 && de.first < 0) sym = -sym;
    if (ce.second < 0 && de.second < 0) sym = -sym;
    Complex eps = gauss_epsilon(d, d_elem);
    Complex root = std::sqrt(sigma_double(gamma.c, 1) * z.z1 + sigma_double(gamma.d, 1)) *
                   std::sqrt(sigma_double(gamma.c, 2) * z.z2 + sigma_double(gamma.d, 2));
    return {eps * static_cast<double>(sym) * root, AutomorphyValue::Method::closed_form};
}

MatrixOverF random_gamma(const RingElement& c, int word_length, std::uint64_t seed) {
    int d = c.d();
    FieldContext ctx = make_field(d);
    if (!divides(RingElement(d, 4, 0), c)) throw LevelError("level must be divisible by 4");
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    MatrixOverF m = identity_matrix(d);
    for (int i = 0; i < word_length; ++i) {
        if (coin(gen))
            m = mat_mul(m, upper_letter(ctx, small_element(d, gen, 2, false)));
        else
            m = mat_mul(m, lower_letter(ctx, c, small_element(d, gen, 2, false)));
    }
    if (!in_level_group(m, c)) throw std::logic_error("letter product left the group");
    return m;
}

MatrixOverF twist_matrix(const RingElement& c, const RingElement& a) {
    int d = c.d();
    FieldContext ctx = make_field(d);
    auto group = unit_group(c);
    const ResidueRing& ring = *group->ring;
    std::uint64_t ai = ring.reduce(a);
    if (!group->is_unit_index(ai))
        throw HypothesisError("entry is not invertible modulo the level");
    RingElement abar = ring.lift(ring.pow(ai, group->group_order - 1));
    // pull the inverse lift into a ball around zero so the matrix entries
    // stay small at every level
    auto [ra, rb] = integral_coords(sigma1(abar) / sigma1(c));
    abar = abar - c * RingElement(d, round_rat(ra), round_rat(rb));
    RingElement k = *exact_div(a * abar - RingElement(d, 1, 0), c);
    QuadVal delta = sigma1(ctx.delta);
    MatrixOverF m{sigma1(a), rat_val(d, 2) / delta * sigma1(k),
                  delta * sigma1(c) / rat_val(d, 2), sigma1(abar)};
    if (!in_level_group(m, c)) throw std::logic_error("twist fell outside the group");
    return m;
}

Complex expansion_eval(const FourierExpansion& f, const UpperHalfPoint& z, double tail_tol) {
    double y1 = z.z1.imag(), y2 = z.z2.imag();
    if (!(y1 > 0.0) || !(y2 > 0.0))
        throw ConvergenceError("evaluation needs positive imaginary parts");
    double cmax = std::abs(f.constant_term().embed());
    for (const auto& [xi, a] : f.support()) cmax = std::max(cmax, std::abs(a.embed()));
    // indices beyond the box exceed one of the caps in some embedding; their
    // coefficients are bounded by the observed maximum (with headroom 4) and
    // the index lattice puts at most 4 points per unit square of the plane
    double bound = 4.0 * std::max(cmax, 1.0);
    double x1cap = sigma_double(f.box().first, 1), x2cap = sigma_double(f.box().second, 1);
    double grid = 1.0 / ((1.0 - std::exp(-kPi * y1)) * (1.0 - std::exp(-kPi * y2)));
    double tail =
        bound * 4.0 * grid * (std::exp(-kPi * x1cap * y1) + std::exp(-kPi * x2cap * y2));
    if (!(tail <= tail_tol))
        throw ConvergenceError("stored box cannot certify the requested tail here");
    Complex acc = f.constant_term().embed();
    for (const auto& [xi, a] : f.support()) {
        auto s = embeddings(xi);
        acc += a.embed() * std::exp(Complex(0.0, kPi) * (s.first * z.z1 + s.second * z.z2));
    }
    return acc;
}

namespace {

struct SampleLaw {
    MatrixOverF gamma;
    UpperHalfPoint z;
    Complex character;  // value the level character takes on the sample word
};

enum class SampleMode { label, expansion };

// Random words of the level group: a run of upper translations, exactly one
// entry with nonzero lower-left (an elementary lower letter or an invertible
// twist), then at most one more translation. Words with several lower
// letters at high level push Im(gamma z) below any evaluation budget, while
// extra translations are absorbed exactly by the periodicity of every series
// here, so this shape loses no generality for the transformation law.
// Samples are re-drawn (deterministically) while the predicted lattice work
// or the conditioning of the reference ratio is unacceptable.
std::vector<SampleLaw> sample_laws(const DirichletCharacter& psi, const RingElement& c,
                                   const RingElement& t, int samples, std::uint64_t seed,
                                   SampleMode mode) {
    int d = c.d();
    FieldContext ctx = make_field(d);
    EmbeddingData e = embedding_data(d);
    auto ts = embeddings(t);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> len_pick(1, 6), coin(0, 1), pct(0, 99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<MatrixOverF> twists;
    for (long a = 3; a <= 25 && twists.size() < 6; a += 2) {
        RingElement cand(d, a, 0);
        if (is_coprime(cand, c)) twists.push_back(twist_matrix(c, cand));
    }

    std::vector<SampleLaw> laws;
    laws.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < 400 && !accepted; ++attempt) {
            int len = len_pick(gen);
            int suffix = (len >= 2 && pct(gen) < 25) ? 1 : 0;
            int prefix = len - 1 - suffix;
            MatrixOverF m = identity_matrix(d);
            for (int j = 0; j < prefix; ++j)
                m = mat_mul(m, upper_letter(ctx, small_element(d, gen, 2, false)));
            if (coin(gen) && !twists.empty()) {
                std::uniform_int_distribution<size_t> tw(0, twists.size() - 1);
                m = mat_mul(m, twists[tw(gen)]);
            } else {
                RingElement bp = mode == SampleMode::expansion
                                     ? RingElement(d, coin(gen) ? 1 : -1, 0)
                                     : small_element(d, gen, 1, true);
                m = mat_mul(m, lower_letter(ctx, c, bp));
            }
            if (suffix) m = mat_mul(m, upper_letter(ctx, small_element(d, gen, 1, false)));
            if (!in_level_group(m, c)) throw std::logic_error("sampled word left the group");

            UpperHalfPoint z;
            if (mode == SampleMode::label) {
                // imaginary parts scaled so the shifted series keeps terms
                // of size e^{-pi u} with u of order one
                double u1 = 0.6 + 0.6 * unit(gen), u2 = 0.6 + 0.6 * unit(gen);
                double r1 = -0.45 + 0.9 * unit(gen), r2 = -0.45 + 0.9 * unit(gen);
                z.z1 = Complex(r1, u1 / ts.first);
                z.z2 = Complex(r2, u2 / ts.second);
            } else {
                // center each coordinate near the pole of the word so the
                // mapped point keeps enough height for the stored box
                double c1 = sigma_double(m.c, 1), c2 = sigma_double(m.c, 2);
                double d1 = sigma_double(m.d, 1), d2 = sigma_double(m.d, 2);
                double j1 = (unit(gen) - 0.5) * 0.1 / std::max(1.0, std::abs(c1));
                double j2 = (unit(gen) - 0.5) * 0.1 / std::max(1.0, std::abs(c2));
                z.z1 = Complex(-d1 / c1 + j1, 0.55 + 0.25 * unit(gen));
                z.z2 = Complex(-d2 / c2 + j2, 0.55 + 0.25 * unit(gen));
            }

            if (mode == SampleMode::label) {
                UpperHalfPoint gz = apply_matrix(m, z);
                double work =
                    plan_lattice(e, ts.first * gz.z1.imag(), ts.second * gz.z2.imag(), 1e-8)
                        .points +
                    plan_lattice(e, gz.z1.imag(), gz.z2.imag(), 1e-9).points;
                if (work > kVerifyPointCap) continue;
                if (std::abs(theta_plain(e, z, 1e-3)) < 0.1) continue;
            }

            RingElement a_elem = *integral_value(m.a);
            laws.push_back({m, z, ideal_char_value(psi, a_elem).conj().embed()});
            accepted = true;
        }
        if (!accepted)
            throw ConvergenceError("could not draw a verifiable sample within budget");
    }
    return laws;
}

double max_deviation_over(const std::vector<SampleLaw>& laws,
                          const std::function<double(const SampleLaw&)>& dev) {
    int threads = std::min<int>(thread_count(), static_cast<int>(laws.size()));
    if (threads <= 1) {
        double worst = 0.0;
        for (const SampleLaw& s : laws) worst = std::max(worst, dev(s));
        return worst;
    }
    std::vector<std::future<double>> futures;
    size_t n = laws.size();
    for (int k = 0; k < threads; ++k) {
        size_t lo = n * static_cast<size_t>(k) / threads;
        size_t hi = n * static_cast<size_t>(k + 1) / threads;
        futures.push_back(std::async(std::launch::async, [&laws, &dev, lo, hi] {
            double worst = 0.0;
            for (size_t i = lo; i < hi; ++i) worst = std::max(worst, dev(laws[i]));
            return worst;
        }));
    }
    double worst = 0.0;
    for (auto& f : futures) worst = std::max(worst, f.get());
    return worst;
}

// |L - R| / max(1, |L|, |R|): absolute when the sides are small, relative
// when the cocycle magnifies them beyond what fixed precision can resolve
double law_deviation(Complex left, Complex right) {
    return std::abs(left - right) / std::max({1.0, std::abs(left), std::abs(right)});
}

ModularityReport assemble_report(const std::vector<SampleLaw>& laws,
                                 const std::function<double(const SampleLaw&)>& dev,
                                 double tol) {
    ModularityReport report;
    report.samples = static_cast<int>(laws.size());
    report.tol = tol;
    report.max_deviation = max_deviation_over(laws, dev);
    report.pass = report.max_deviation < tol;
    return report;
}

}  // namespace

ModularityReport verify_modularity(const DirichletCharacter& chi, const RingElement& t,
                                   const DirichletCharacter& psi, const RingElement& c,
                                   int samples, double tol, std::uint64_t seed) {
    EmbeddingData e = embedding_data(c.d());
    WeightTable table = make_weight_table(chi);
    auto laws = sample_laws(psi, c, t, samples, seed, SampleMode::label);
    auto dev = [&](const SampleLaw& s) {
        double damp = std::max(1.0, cocycle_scale_impl(s.gamma, s.z));
        UpperHalfPoint gz = apply_matrix(s.gamma, s.z);
        Complex left = theta_weighted(e, table, t, gz, tol * 1e-2);
        Complex h = theta_plain(e, gz, tol * 1e-3) / theta_plain(e, s.z, tol * 1e-3 / damp);
        Complex right = s.character * h * theta_weighted(e, table, t, s.z, tol * 1e-3 / damp);
        return law_deviation(left, right);
    };
    return assemble_report(laws, dev, tol);
}

ModularityReport verify_modularity(const FourierExpansion& f, const DirichletCharacter& psi,
                                   const RingElement& c, int samples, double tol,
                                   std::uint64_t seed) {
    EmbeddingData e = embedding_data(c.d());
    auto laws =
        sample_laws(psi, c, RingElement(c.d(), 1, 0), samples, seed, SampleMode::expansion);
    auto dev = [&](const SampleLaw& s) {
        double damp = std::max(1.0, cocycle_scale_impl(s.gamma, s.z));
        UpperHalfPoint gz = apply_matrix(s.gamma, s.z);
        Complex left = expansion_eval(f, gz, tol / 10.0);
        Complex h = theta_plain(e, gz, tol * 1e-3) / theta_plain(e, s.z, tol * 1e-3 / damp);
        Complex right = s.character * h * expansion_eval(f, s.z, tol / 10.0);
        return law_deviation(left, right);
    };
    return assemble_report(laws, dev, tol);
}

namespace {

UpperHalfPoint w_map(const FieldContext& ctx, const RingElement& c, const UpperHalfPoint& z) {
    QuadVal d2c = sigma1(ctx.delta) * sigma1(ctx.delta) * sigma1(c);
    return {-4.0 / (sigma_double(d2c, 1) * z.z1), -4.0 / (sigma_double(d2c, 2) * z.z2)};
}

Complex w_prefactor(const FieldContext& ctx, const RingElement& c, const UpperHalfPoint& z) {
    Complex minus_i(0.0, -1.0);
    Complex root = std::sqrt(minus_i * z.z1) * std::sqrt(minus_i * z.z2);
    double nd = std::abs(mpz_class(norm(ctx.delta)).get_d());
    double nc = std::abs(mpz_class(norm(c)).get_d());
    return 1.0 / root * std::pow(nd * nd * nc / 16.0, -0.25);
}

}  // namespace

Complex w_operator_eval(const FourierExpansion& f, const RingElement& c,
                        const UpperHalfPoint& z) {
    if (z.y_min() < evaluation_floor())
        throw ConvergenceError("imaginary part below the evaluation floor");
    FieldContext ctx = make_field(c.d());
    return w_prefactor(ctx, c, z) * expansion_eval(f, w_map(ctx, c, z), 1e-10);
}

double w_involution_deviation(const FourierExpansion& f, const RingElement& c,
                              const UpperHalfPoint& z) {
    FieldContext ctx = make_field(c.d());
    // both applications inlined: the once-mapped point sinks far below the
    // public floor, where only the certified expansion tail is trustworthy
    UpperHalfPoint w = w_map(ctx, c, z);
    Complex twice = w_prefactor(ctx, c, z) * w_prefactor(ctx, c, w) *
                    expansion_eval(f, w_map(ctx, c, w), 1e-10);
    return std::abs(twice - expansion_eval(f, z, 1e-10));
}

std::vector<RingElement> ideal_reps_up_to_norm(int d, long bound) {
    if (bound < 1) return {};
    RingElement eps2 = fundamental_unit(d) * fundamental_unit(d);
    // the trace-minimal totally positive generator has both embeddings below
    // sqrt(N sigma1(eps^2)), with a whisker for rounding
    double cap = (std::sqrt(embeddings(eps2).first) * 1.001 + 0.01) *
                 std::sqrt(static_cast<double>(bound));
    std::vector<RingElement> out;
    for (const RingElement& x : enumerate_box(d, cap, cap, false)) {
        if (!is_totally_positive(x)) continue;
        Int n = abs(Int(norm(x)));
        if (n > bound) continue;
        if (!(canonical_rep_mod_squared_units(x) == x)) continue;
        out.push_back(x);
    }
    std::sort(out.begin(), out.end(), [](const RingElement& x, const RingElement& y) {
        Int nx = abs(Int(norm(x))), ny = abs(Int(norm(y)));
        if (nx != ny) return nx < ny;
        Int tx = trace(x), ty = trace(y);
        if (tx != ty) return tx < ty;
        Int xa = x.a(), ya = y.a();
        if (xa != ya) return xa < ya;
        Int xb = x.b(), yb = y.b();
        return xb < yb;
    });
    return out;
}

Complex partial_L(const FourierExpansion& f, double s, long norm_bound) {
    Complex acc(0.0, 0.0);
    for (const RingElement& rep : ideal_reps_up_to_norm(f.d(), norm_bound)) {
        double n = std::abs(mpz_class(norm(rep)).get_d());
        acc += coeff_at_ideal(f, rep).embed() * std::pow(n, -s);
    }
    return acc;
}

Complex euler_partial(const DirichletCharacter& psi, double s, long norm_bound) {
    Complex acc(1.0, 0.0);
    for (const RingElement& rep : ideal_reps_up_to_norm(psi.modulus.d(), norm_bound)) {
        if (prime_omega(rep) != 1) continue;
        double n = std::abs(mpz_class(norm(rep)).get_d());
        acc /= 1.0 - ideal_char_value(psi, rep).embed() * std::pow(n, -2.0 * s);
    }
    return acc;
}

}  // namespace hmf
