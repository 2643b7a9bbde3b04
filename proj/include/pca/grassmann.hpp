#pragma once

#include "pca/lattice.hpp"
#include "pca/operators.hpp"

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pca {

inline constexpr int kMaxGrassmannVars = 16;

// Element of a real Grassmann algebra with integer coefficients.
// A monomial is a bitmask (bit i <=> psi_i present) read in ascending index order.
class GrassmannElement {
public:
    using Mask = std::uint32_t;
    using Coeff = std::int64_t;

    GrassmannElement() = default;
    explicit GrassmannElement(int n_vars);

    static GrassmannElement scalar(int n_vars, Coeff c);
    static GrassmannElement variable(int n_vars, int index);
    // Product psi_{i0} psi_{i1} ... in the given order; zero if an index repeats.
    static GrassmannElement product(int n_vars, std::initializer_list<int> indices);
    static GrassmannElement product(int n_vars, const std::vector<int>& indices);

    int n_vars() const noexcept { return n_vars_; }
    const std::map<Mask, Coeff>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_even() const noexcept;

    // Coefficient of the ascending-order monomial.
    Coeff coefficient(Mask mask) const noexcept;
    // Coefficient relative to the product written in the given order.
    Coeff coefficient_of(std::initializer_list<int> ordered) const;

    void add_term(Mask mask, Coeff c);

    GrassmannElement& operator+=(const GrassmannElement& o);
    GrassmannElement& operator-=(const GrassmannElement& o);
    GrassmannElement& operator*=(Coeff c);
    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
    friend GrassmannElement operator*(GrassmannElement a, Coeff c) { return a *= c; }
    friend GrassmannElement operator*(Coeff c, GrassmannElement a) { return a *= c; }
    friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b);

    // Re-indexes variable i to i + offset inside an algebra of n_vars_total variables.
    GrassmannElement embedded(int n_vars_total, int offset) const;

    std::string to_string() const;

    friend bool operator==(const GrassmannElement&, const GrassmannElement&) = default;

private:
    int n_vars_ = 0;
    std::map<Mask, Coeff> terms_;
};

// Sign (+1/-1) of reordering the concatenation a b into ascending order; 0 if they overlap.
int monomial_product_sign(GrassmannElement::Mask a, GrassmannElement::Mask b) noexcept;

GrassmannElement multiply(const GrassmannElement& a, const GrassmannElement& b);

// Integrates the listed variables, innermost (first applied) is the lowest index:
// int dpsi_k ... dpsi_j f with j < k. Each dpsi_i anticommutes with every psi.
GrassmannElement berezin_integrate(const GrassmannElement& e, GrassmannElement::Mask vars);

// exp(a) for an element with vanishing scalar part; the series terminates by nilpotency.
// Throws if a term of a^k / k! is not an integer.
GrassmannElement exp_nilpotent(const GrassmannElement& a);

// eta_M = (-1)^{M(M-1)/2}
constexpr int eta_sign(int m) noexcept { return ((m * (m - 1) / 2) % 2 == 0) ? 1 : -1; }

// Basis elements over m local variables, indexed by the occupation bitmask tau
// (bit i set <=> site i occupied). g_tau is the ascending product of psi_i over
// EMPTY sites with sign +1; gbar_tau is the product over occupied sites, signed so
// that int D psi gbar_tau g_tau = 1.
struct BasisFamily {
    int m = 0;
    std::vector<GrassmannElement> g, gbar, gprime, gbarprime;
    std::vector<int> m_tau, mbar_tau;

    std::size_t size() const noexcept { return g.size(); }
};

BasisFamily basis_family(int m);

// Single-block free factor over variables
//   0 = phi(t, left), 1 = phi(t, right), 2 = phi(t+1, left), 3 = phi(t+1, right),
// with quartic coefficient (1 - g).
GrassmannElement local_factor_free(std::int64_t g, Parity parity);

// exp(-L_kin) + K_int over 0..3 = zeta_1..zeta_4 (layer t), 4..7 = zeta'_1..zeta'_4 (layer t+1).
GrassmannElement local_factor_interacting();
GrassmannElement interacting_kinetic_exponent();
GrassmannElement interacting_k_int();

struct StepOperatorExtraction {
    int m = 0;
    Parity parity = Parity::even;
    int eta = 1; // eta_M of the local variable count, reported rather than applied
    std::vector<std::int64_t> matrix; // row-major, (2^m) x (2^m), S[tau][rho]

    std::size_t dim() const noexcept { return std::size_t{1} << m; }
    std::int64_t at(std::size_t tau, std::size_t rho) const noexcept { return matrix[tau * dim() + rho]; }
    // Set when every row and column holds exactly one +-1.
    std::optional<SignedPermutation> unique_jump() const;
};

class ExpansionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reads S off the bilinear expansion of k: gbar'(upper) S gbar(lower) for even parity,
// g(upper) S g'(lower) for odd parity. Layer t uses variables [0, m), layer t+1 [m, 2m).
StepOperatorExtraction extract_step_operator(const GrassmannElement& k, int m, Parity parity);

enum class GaugeKind { similarity, anti_similarity, general };

struct SignGauge {
    std::vector<std::int8_t> d_out;
    std::vector<std::int8_t> d_in;
    SignedPermutation gauged; // D_out S D_in, nonnegative
    // D_out = D_in, or D_out = -D_in (a global sign), realizable for this operator.
    bool similarity_possible = false;
    bool anti_similarity_possible = false;
    GaugeKind kind = GaugeKind::general;
};

// Diagonal +-1 matrices making S a nonnegative permutation. Cycles of the permutation are
// walked from their smallest column with d_in = +1; along a cycle d_in follows d_out.
std::optional<SignGauge> sign_gauge_search(const SignedPermutation& s);
std::optional<SignGauge> sign_gauge_search(const StepOperatorExtraction& s);

std::string_view to_string(GaugeKind k) noexcept;

} // namespace pca
