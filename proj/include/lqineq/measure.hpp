#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lqineq/quadrature.hpp"

namespace lqineq {

enum class Family { gaussian, exp_power, heavy_tail, bertrand, uniform, lebesgue, custom, custom_tabulated };

const char* to_string(Family f);
Family family_from_string(const std::string& name);

struct Interval {
    double lo;
    double hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct TruncationSpec {
    double bound = 1e6;  // window never extends beyond |x - center| > bound
};

// Density on an interval of the real line, plus the cached tables every functional uses.
// Instances are immutable; copies share the tables.
class Measure1D {
public:
    using LogKernel = std::function<double(double)>;

    static Measure1D build(Family family, const std::vector<double>& params, TruncationSpec trunc = {},
                           QuadratureConfig cfg = {});
    static Measure1D gaussian(double sigma = 1.0, TruncationSpec trunc = {}, QuadratureConfig cfg = {});
    static Measure1D exp_power(double p, TruncationSpec trunc = {}, QuadratureConfig cfg = {});
    static Measure1D heavy_tail(double alpha, TruncationSpec trunc = {}, QuadratureConfig cfg = {});
    static Measure1D bertrand(double alpha, double beta, TruncationSpec trunc = {}, QuadratureConfig cfg = {});
    static Measure1D uniform(double a, double b, QuadratureConfig cfg = {});
    // unit density on [a,b], not normalized
    static Measure1D lebesgue(double a, double b, QuadratureConfig cfg = {});
    // log_kernel is an unnormalized log-density; kinks become grid nodes
    static Measure1D custom(LogKernel log_kernel, Interval support, bool probability, double center = 0.0,
                            double scale = 1.0, std::vector<double> kinks = {}, TruncationSpec trunc = {},
                            QuadratureConfig cfg = {});
    // piecewise-linear density through the points (x_i, d_i)
    static Measure1D tabulated(std::vector<double> x, std::vector<double> density, bool probability = true,
                               QuadratureConfig cfg = {});

    Family family() const;
    const std::vector<double>& params() const;
    bool is_probability() const;
    Interval support() const;
    Interval window() const;
    double center() const;
    double scale() const;
    const QuadratureConfig& config() const;

    double Z() const;
    double log_Z() const;
    // mass outside the window relative to the total
    double truncation_mass() const;

    double log_kernel(double x) const;
    // density (divided by Z for probability measures)
    double log_density(double x) const;
    double density(double x) const;

    // extended node tables (window plus far tails)
    const std::vector<double>& nodes() const;
    const std::vector<double>& log_kernel_nodes() const;
    // log of the unnormalized mass left of / right of each node, remainders included
    const std::vector<double>& log_left_nodes() const;
    const std::vector<double>& log_right_nodes() const;
    std::size_t cell_of(double x) const;

    // window nodes shared with every GridFunction sampled on this measure
    const std::shared_ptr<const std::vector<double>>& window_nodes() const;
    // 7 Gauss points per window cell; weights include the density
    const std::vector<double>& window_rule_x() const;
    const std::vector<double>& window_rule_w() const;
    // density mass of each window cell
    const std::vector<double>& window_cell_mass() const;
    // density mass of arbitrary cells (exact cache hit when nodes are the window nodes)
    std::vector<double> cell_masses(const std::vector<double>& nodes) const;

    // log of the unnormalized integral of the kernel over [a,b]
    double log_partial(double a, double b) const;
    double log_tail_right(double x) const;  // log mu([x, inf)), normalized
    double log_tail_left(double x) const;   // log mu((-inf, x]), normalized
    double tail_right(double x) const;
    double tail_left(double x) const;
    double mass(double a, double b) const;

    // x with log mu([x,inf)) = log_t (clamped to the table ends)
    double inverse_log_tail_right(double log_t) const;
    double inverse_log_tail_left(double log_t) const;
    double quantile(double p) const;
    double median() const;

    // grading map used for auxiliary grids: x = center + scale*sinh(xi) on unbounded sides
    double to_grade(double x) const;
    double from_grade(double xi) const;

    struct Data;

private:
    explicit Measure1D(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static Measure1D finish(std::shared_ptr<Data> d);
    std::shared_ptr<const Data> d_;
};

// Piecewise-linear function on a node set.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::shared_ptr<const std::vector<double>> nodes, std::vector<double> values);

    template <class F>
    static GridFunction sample(const Measure1D& mu, F&& f) {
        const auto& n = mu.window_nodes();
        std::vector<double> v(n->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*n)[i]);
        return GridFunction(n, std::move(v));
    }

    const std::vector<double>& nodes() const { return *nodes_; }
    const std::shared_ptr<const std::vector<double>>& nodes_ptr() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator()(double x) const;

private:
    std::shared_ptr<const std::vector<double>> nodes_;
    std::vector<double> values_;
};

// [Var_mu(f^q)]^{1/q}
double variance_q(const Measure1D& mu, const GridFunction& f, double q);
// [Ent_mu(f^{2q})]^{1/q}
double entropy_q(const Measure1D& mu, const GridFunction& f, double q);
// integral of |f'|^2 against nu, f' cellwise constant
double dirichlet_energy(const Measure1D& nu, const GridFunction& f);
double oscillation(const Measure1D& mu, const GridFunction& f);
// integral of g(f) against mu over the window
double integrate_composed(const Measure1D& mu, const GridFunction& f, const std::function<double(double)>& g);

}  // namespace lqineq
