#include "spde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spde {

Field Field::constant(double value) { return Field(value); }

Field Field::from_expression(const Expression& e) {
    if (!e.depends_on_x() && !e.depends_on_t())
        return constant(e(0.0, {}));
    return function([e](double t, std::span<const double> x) { return e(t, x); },
                    e.depends_on_t(), e.depends_on_x());
}

Field Field::function(Fn fn, bool varies_in_t, bool varies_in_x) {
    Field f;
    f.fn_ = std::move(fn);
    f.varies_t_ = varies_in_t;
    f.varies_x_ = varies_in_x;
    f.value_.reset();
    return f;
}

// ---------------------------------------------------------------------------

ContinuousCoefficients::ContinuousCoefficients(int dimension, std::size_t noise_dim)
    : dim_(dimension), noise_dim_(noise_dim) {
    if (dim_ < 1)
        throw std::invalid_argument("dimension must be at least 1");
    if (noise_dim_ < 1)
        throw std::invalid_argument("noise dimension must be at least 1");
    const auto n = static_cast<std::size_t>(dim_ + 1);
    a_.assign(n * n, Field::constant(0.0));
    b_.assign(n * noise_dim_, Field::constant(0.0));
    g_.assign(noise_dim_, Field::constant(0.0));
    f_ = Field::constant(0.0);
    u0_ = Field::constant(0.0);
}

std::size_t ContinuousCoefficients::a_index(int alpha, int beta) const {
    if (alpha < 0 || beta < 0 || alpha > dim_ || beta > dim_)
        throw std::out_of_range("a index out of range");
    return static_cast<std::size_t>(alpha) * static_cast<std::size_t>(dim_ + 1) +
           static_cast<std::size_t>(beta);
}

std::size_t ContinuousCoefficients::b_index(int alpha, std::size_t rho) const {
    if (alpha < 0 || alpha > dim_ || rho >= noise_dim_)
        throw std::out_of_range("b index out of range");
    return static_cast<std::size_t>(alpha) * noise_dim_ + rho;
}

void ContinuousCoefficients::set_a(int alpha, int beta, Field field) {
    a_[a_index(alpha, beta)] = field;
    a_[a_index(beta, alpha)] = std::move(field);
}

void ContinuousCoefficients::set_b(int alpha, std::size_t rho, Field field) {
    b_[b_index(alpha, rho)] = std::move(field);
}

void ContinuousCoefficients::set_g(std::size_t rho, Field field) { g_.at(rho) = std::move(field); }

const Field& ContinuousCoefficients::a_field(int alpha, int beta) const {
    return a_[a_index(alpha, beta)];
}

const Field& ContinuousCoefficients::b_field(int alpha, std::size_t rho) const {
    return b_[b_index(alpha, rho)];
}

bool ContinuousCoefficients::constant_in_x() const {
    auto fixed = [](const Field& f) { return !f.varies_in_x(); };
    return std::all_of(a_.begin(), a_.end(), fixed) && std::all_of(b_.begin(), b_.end(), fixed);
}

bool ContinuousCoefficients::time_invariant() const {
    auto fixed = [](const Field& f) { return !f.varies_in_t(); };
    return std::all_of(a_.begin(), a_.end(), fixed) && std::all_of(b_.begin(), b_.end(), fixed);
}

bool ContinuousCoefficients::diagonal_diffusion() const {
    for (int alpha = 1; alpha <= dim_; ++alpha)
        for (int beta = 1; beta <= dim_; ++beta)
            if (alpha != beta && !a_field(alpha, beta).is_zero())
                return false;
    return true;
}

bool ContinuousCoefficients::has_free_terms() const {
    if (!f_.is_zero())
        return true;
    return std::any_of(g_.begin(), g_.end(), [](const Field& g) { return !g.is_zero(); });
}

// ---------------------------------------------------------------------------

DiscreteCoefficients::DiscreteCoefficients(Stencil stencil, TorusGrid grid, std::size_t noise_dim,
                                           std::size_t steps, bool time_invariant)
    : stencil_(std::move(stencil)), grid_(std::move(grid)), noise_dim_(noise_dim), steps_(steps) {
    if (stencil_.dimension() != grid_.dimension())
        throw std::invalid_argument("stencil and grid dimensions differ");
    if (noise_dim_ == 0)
        throw std::invalid_argument("noise dimension must be at least 1");
    const std::size_t s = stencil_.size();
    Slice zero{std::vector<std::vector<double>>(s * s, std::vector<double>{0.0}),
               std::vector<std::vector<double>>(s * noise_dim_, std::vector<double>{0.0})};
    slices_.assign(time_invariant ? 1 : steps_ + 1, zero);
}

DiscreteCoefficients DiscreteCoefficients::constant(Stencil stencil, TorusGrid grid,
                                                    std::size_t steps,
                                                    const Eigen::MatrixXd& a_table,
                                                    const Eigen::MatrixXd& b_table) {
    const auto s = static_cast<Eigen::Index>(stencil.size());
    if (a_table.rows() != s || a_table.cols() != s || b_table.rows() != s || b_table.cols() < 1)
        throw std::invalid_argument("coefficient tables do not match the stencil");
    DiscreteCoefficients dc(std::move(stencil), std::move(grid),
                            static_cast<std::size_t>(b_table.cols()), steps, true);
    const Eigen::MatrixXd sym = 0.5 * (a_table + a_table.transpose());
    for (Eigen::Index l = 0; l < s; ++l)
        for (Eigen::Index m = l; m < s; ++m)
            dc.set_a(0, static_cast<std::size_t>(l), static_cast<std::size_t>(m), {sym(l, m)});
    for (Eigen::Index l = 0; l < s; ++l)
        for (Eigen::Index r = 0; r < b_table.cols(); ++r)
            dc.set_b(0, static_cast<std::size_t>(l), static_cast<std::size_t>(r), {b_table(l, r)});
    return dc;
}

DiscreteCoefficients::Slice& DiscreteCoefficients::slice_mut(std::size_t i) {
    if (slices_.size() == 1)
        return slices_[0];
    return slices_.at(i);
}

void DiscreteCoefficients::check_values(const std::vector<double>& values) const {
    if (values.size() != 1 && values.size() != grid_.point_count())
        throw std::invalid_argument("coefficient field must hold 1 or point-count values");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("coefficient field is not finite");
}

void DiscreteCoefficients::set_a(std::size_t i, std::size_t lambda, std::size_t mu,
                                 std::vector<double> values) {
    check_values(values);
    const std::size_t s = stencil_.size();
    if (lambda >= s || mu >= s)
        throw std::out_of_range("stencil index out of range");
    auto& sl = slice_mut(i);
    sl.a[lambda * s + mu] = values;
    sl.a[mu * s + lambda] = std::move(values);
}

void DiscreteCoefficients::set_b(std::size_t i, std::size_t lambda, std::size_t rho,
                                 std::vector<double> values) {
    check_values(values);
    if (lambda >= stencil_.size() || rho >= noise_dim_)
        throw std::out_of_range("b index out of range");
    slice_mut(i).b[lambda * noise_dim_ + rho] = std::move(values);
}

bool DiscreteCoefficients::constant_in_x() const {
    for (const auto& sl : slices_) {
        for (const auto& v : sl.a)
            if (v.size() != 1)
                return false;
        for (const auto& v : sl.b)
            if (v.size() != 1)
                return false;
    }
    return true;
}

bool DiscreteCoefficients::a_is_zero(std::size_t i, std::size_t lambda, std::size_t mu) const {
    const auto& v = slice(i).a[lambda * stencil_.size() + mu];
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool DiscreteCoefficients::b_is_zero(std::size_t i, std::size_t lambda, std::size_t rho) const {
    const auto& v = slice(i).b[lambda * noise_dim_ + rho];
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

Eigen::MatrixXd DiscreteCoefficients::a_table(std::size_t i, std::size_t point) const {
    const auto s = stencil_.size();
    Eigen::MatrixXd m(s, s);
    for (std::size_t l = 0; l < s; ++l)
        for (std::size_t k = 0; k < s; ++k)
            m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = a(i, l, k, point);
    return m;
}

Eigen::MatrixXd DiscreteCoefficients::b_table(std::size_t i, std::size_t point) const {
    const auto s = stencil_.size();
    Eigen::MatrixXd m(s, noise_dim_);
    for (std::size_t l = 0; l < s; ++l)
        for (std::size_t r = 0; r < noise_dim_; ++r)
            m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = b(i, l, r, point);
    return m;
}

double DiscreteCoefficients::max_abs_a() const {
    double m = 0.0;
    for (const auto& sl : slices_)
        for (const auto& v : sl.a)
            for (double x : v)
                m = std::max(m, std::abs(x));
    return m;
}

double DiscreteCoefficients::max_abs_b() const {
    double m = 0.0;
    for (const auto& sl : slices_)
        for (const auto& v : sl.b)
            for (double x : v)
                m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 0)
        return std::numeric_limits<double>::infinity();
    if (m.rows() == 1)
        return m(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// radical inverse in the given prime base
double halton(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

}  // namespace

ParabolicityReport check_parabolicity_continuous(const ContinuousCoefficients& c,
                                                 std::span<const SpaceTimePoint> samples,
                                                 double kappa) {
    const int d = c.dimension();
    ParabolicityReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd m(d, d);
    for (const auto& s : samples) {
        for (std::size_t rho = 0; rho < c.noise_dim(); ++rho) {
            for (int alpha = 1; alpha <= d; ++alpha)
                for (int beta = 1; beta <= d; ++beta)
                    m(alpha - 1, beta - 1) = 2.0 * c.a(alpha, beta, s.t, s.x) -
                                             c.b(alpha, rho, s.t, s.x) * c.b(beta, rho, s.t, s.x);
            report.worst_margin = std::min(report.worst_margin, min_eigenvalue(m));
        }
        ++report.samples_checked;
    }
    report.pass = report.samples_checked > 0 && report.worst_margin >= kappa;
    return report;
}

ParabolicityReport check_parabolicity_discrete(const DiscreteCoefficients& dc,
                                               std::span<const GridSample> samples, double kappa) {
    const std::size_t s = dc.stencil().size();
    const auto n0 = static_cast<Eigen::Index>(s - 1);
    ParabolicityReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd m(n0, n0);
    for (const auto& sample : samples) {
        for (std::size_t rho = 0; rho < dc.noise_dim(); ++rho) {
            for (std::size_t l = 1; l < s; ++l)
                for (std::size_t k = 1; k < s; ++k)
                    m(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(k - 1)) =
                        2.0 * dc.a(sample.step, l, k, sample.point) -
                        dc.b(sample.step, l, rho, sample.point) * dc.b(sample.step, k, rho, sample.point);
            report.worst_margin = std::min(report.worst_margin, min_eigenvalue(m));
        }
        ++report.samples_checked;
    }
    report.pass = report.samples_checked > 0 && report.worst_margin >= kappa;
    return report;
}

std::vector<SpaceTimePoint> default_continuous_samples(const ContinuousCoefficients& c,
                                                       const TorusGrid& grid, const TimeGrid& tg) {
    const auto d = static_cast<std::size_t>(grid.dimension());
    std::vector<SpaceTimePoint> out;
    if (c.constant_in_x()) {
        for (std::size_t i = 0; i <= tg.steps(); ++i)
            out.push_back({tg.time(i), std::vector<double>(d, 0.0)});
        return out;
    }
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    if (d + 1 > std::size(primes))
        throw std::invalid_argument("quasi-random sampling supports d <= 10");
    for (std::size_t k = 1; k <= 1000; ++k) {
        SpaceTimePoint p{tg.horizon() * halton(k, primes[0]), std::vector<double>(d)};
        for (std::size_t a = 0; a < d; ++a)
            p.x[a] = grid.side_length(static_cast<int>(a)) * halton(k, primes[a + 1]);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<GridSample> default_discrete_samples(const DiscreteCoefficients& dc) {
    const std::size_t points = dc.constant_in_x() ? 1 : dc.grid().point_count();
    const std::size_t steps = dc.time_invariant() ? 1 : dc.steps() + 1;
    std::vector<GridSample> out;
    out.reserve(points * steps);
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t p = 0; p < points; ++p)
            out.push_back({i, p});
    return out;
}

// ---------------------------------------------------------------------------

double ConsistencyResidual::max() const {
    double m = a00;
    for (const auto* v : {&a_first, &a_second, &b0, &b_first})
        for (double r : *v)
            m = std::max(m, r);
    return m;
}

ConsistencyResidual consistency_residual(const DiscreteCoefficients& dc,
                                         const ContinuousCoefficients& c, const TimeGrid& tg,
                                         std::size_t i, std::size_t point) {
    const auto& stencil = dc.stencil();
    const int d = c.dimension();
    const std::size_t s = stencil.size();
    const double t = tg.time(i);
    const auto x = dc.grid().coordinates(point);

    ConsistencyResidual r;
    r.a00 = std::abs(dc.a(i, 0, 0, point) - c.a(0, 0, t, x));

    for (int alpha = 1; alpha <= d; ++alpha) {
        const auto ax = static_cast<std::size_t>(alpha - 1);
        double lhs = 0.0;
        for (std::size_t l = 1; l < s; ++l)
            lhs += (dc.a(i, l, 0, point) + dc.a(i, 0, l, point)) * stencil[l][ax];
        r.a_first.push_back(std::abs(lhs - (c.a(alpha, 0, t, x) + c.a(0, alpha, t, x))));
    }
    for (int alpha = 1; alpha <= d; ++alpha) {
        for (int beta = 1; beta <= d; ++beta) {
            double lhs = 0.0;
            for (std::size_t l = 1; l < s; ++l)
                for (std::size_t m = 1; m < s; ++m)
                    lhs += dc.a(i, l, m, point) * stencil[l][static_cast<std::size_t>(alpha - 1)] *
                           stencil[m][static_cast<std::size_t>(beta - 1)];
            r.a_second.push_back(std::abs(lhs - c.a(alpha, beta, t, x)));
        }
    }
    for (std::size_t rho = 0; rho < c.noise_dim(); ++rho)
        r.b0.push_back(std::abs(dc.b(i, 0, rho, point) - c.b(0, rho, t, x)));
    for (int alpha = 1; alpha <= d; ++alpha) {
        for (std::size_t rho = 0; rho < c.noise_dim(); ++rho) {
            double lhs = 0.0;
            for (std::size_t l = 1; l < s; ++l)
                lhs += dc.b(i, l, rho, point) * stencil[l][static_cast<std::size_t>(alpha - 1)];
            r.b_first.push_back(std::abs(lhs - c.b(alpha, rho, t, x)));
        }
    }
    return r;
}

double max_consistency_residual(const DiscreteCoefficients& dc, const ContinuousCoefficients& c,
                                const TimeGrid& tg) {
    const std::size_t points = c.constant_in_x() && dc.constant_in_x() ? 1 : dc.grid().point_count();
    double worst = 0.0;
    for (std::size_t i = 0; i <= dc.steps(); ++i)
        for (std::size_t p = 0; p < points; ++p)
            worst = std::max(worst, consistency_residual(dc, c, tg, i, p).max());
    return worst;
}

DiscreteCoefficients build_discrete_from_continuous(const ContinuousCoefficients& c,
                                                    const Stencil& stencil, const TorusGrid& grid,
                                                    const TimeGrid& tg) {
    const int d = c.dimension();
    if (stencil.dimension() != d || grid.dimension() != d)
        throw UnsupportedCoefficients("coefficient, stencil and grid dimensions differ");
    if (!stencil.is_coordinate())
        throw UnsupportedCoefficients(
            "consistent coefficients are built only for the coordinate stencil {0, e_1..e_d}");
    if (!c.diagonal_diffusion())
        throw UnsupportedCoefficients(
            "consistent coefficients are built only for diagonal diffusion; supply discrete "
            "coefficients directly");

    const bool invariant = c.time_invariant();
    const bool uniform = c.constant_in_x();
    DiscreteCoefficients dc(stencil, grid, c.noise_dim(), tg.steps(), invariant);

    auto sample = [&](double t, auto&& fn) {
        if (uniform) {
            const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
            return std::vector<double>{fn(t, std::span<const double>(origin))};
        }
        std::vector<double> v(grid.point_count());
        for (std::size_t p = 0; p < v.size(); ++p) {
            const auto x = grid.coordinates(p);
            v[p] = fn(t, std::span<const double>(x));
        }
        return v;
    };

    const std::size_t slices = invariant ? 1 : tg.steps() + 1;
    for (std::size_t i = 0; i < slices; ++i) {
        const double t = tg.time(i);
        dc.set_a(i, 0, 0, sample(t, [&](double tt, std::span<const double> x) { return c.a(0, 0, tt, x); }));
        for (int j = 1; j <= d; ++j) {
            const auto lj = static_cast<std::size_t>(j);
            dc.set_a(i, lj, lj, sample(t, [&](double tt, std::span<const double> x) {
                         return c.a(j, j, tt, x);
                     }));
            dc.set_a(i, lj, 0, sample(t, [&](double tt, std::span<const double> x) {
                         return 0.5 * (c.a(j, 0, tt, x) + c.a(0, j, tt, x));
                     }));
        }
        for (std::size_t rho = 0; rho < c.noise_dim(); ++rho) {
            dc.set_b(i, 0, rho, sample(t, [&](double tt, std::span<const double> x) {
                         return c.b(0, rho, tt, x);
                     }));
            for (int j = 1; j <= d; ++j)
                dc.set_b(i, static_cast<std::size_t>(j), rho,
                         sample(t, [&](double tt, std::span<const double> x) { return c.b(j, rho, tt, x); }));
        }
    }
    return dc;
}

}  // namespace spde
