#pragma once

#include "pap/common.hpp"
#include "pap/hermite.hpp"
#include "pap/instance.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pap {

struct PlantedSample {
    std::vector<int> v_sign;  // v_i = v_sign[i] / sqrt(n)
    std::vector<int> b;
    Instance instance;

    Eigen::VectorXd v() const;
};

Instance sample_instance(int n, int m, Basis setting, std::uint64_t seed);
PlantedSample sample_planted(int n, int m, Basis setting, std::uint64_t seed);

// (v^a / |v|^{|a|}) h_{|a|}(b), a indexed by coordinate
double planted_conditional_moment(const std::vector<int>& alpha_u, const Eigen::VectorXd& v, double b);

Rational planted_fourier_coeff(const std::vector<int>& I, const CellMultiIndex& alpha, int n, int m, Basis setting);

// E_pl[v^I chi_alpha(d)] by enumerating (v, b, d); boolean setting, n a perfect square
Rational planted_expectation_exhaustive(const std::vector<int>& I, const CellMultiIndex& alpha, int n, int m);

class PseudoExpectation {
public:
    PseudoExpectation() = default;
    PseudoExpectation(int n, int D, int T, Basis setting);

    int n() const { return n_; }
    int D() const { return D_; }
    int T() const { return T_; }
    Basis setting() const { return setting_; }
    bool normalized() const { return normalized_; }
    void set_normalized(bool f) { normalized_ = f; }

    const SubsetIndex& index() const { return index_; }
    Eigen::VectorXd& values() { return values_; }
    const Eigen::VectorXd& values() const { return values_; }

    double operator()(const std::vector<int>& I) const { return values_[index_.rank(I)]; }
    double& at(const std::vector<int>& I) { return values_[index_.rank(I)]; }
    // arbitrary monomial given as a list of coordinates with repetition; v_i^2 -> 1/n
    double monomial(std::vector<int> coords) const;

private:
    int n_ = 0, D_ = 0, T_ = 0;
    Basis setting_ = Basis::gaussian;
    bool normalized_ = false;
    SubsetIndex index_;
    Eigen::VectorXd values_;
};

enum class PeMode { shape_sum, alpha_enum, row_series };
std::string to_string(PeMode m);
PeMode pe_mode_from_string(const std::string& s);

struct PeOptions {
    PeMode mode = PeMode::shape_sum;
    std::size_t catalog_cap = 200000;
    double work_budget = 2e9;
};

PseudoExpectation build_pe(const Instance& inst, int D, int T, const PeOptions& opt = {});
PseudoExpectation normalize(const PseudoExpectation& pe);

// symbolic Fourier expansion of E~[v^I] in the characters of d, |alpha| <= T
using FourierSeries = std::map<CellMultiIndex, Rational>;
std::map<std::vector<int>, FourierSeries> pe_fourier_series(int n, int m, int D, int T, Basis setting);
double evaluate_series(const FourierSeries& f, const Instance& inst);

struct WindowReport {
    int n = 0, m = 0, D = 0, T = 0;
    std::set<int> support_sizes;
    bool in_window = true;
    bool identically_zero = true;
    double residual_l2 = 0;           // L2 norm of the residual polynomials
    double instance_residual_l2 = 0;  // l2 of residual values on the given instance, if any
};
WindowReport truncation_window_check(int n, int m, int D, int T, Basis setting = Basis::gaussian,
                                     const Instance* inst = nullptr);

void write_instance(const Instance& inst, const std::string& base);  // base.csv + base.json
Instance read_instance(const std::string& base);
std::string pe_to_json(const PseudoExpectation& pe);
PseudoExpectation pe_from_json(const std::string& text);

}  // namespace pap
