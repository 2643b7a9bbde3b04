#pragma once

#include "pca/automaton.hpp"
#include "pca/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pca {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unique-jump matrix: column rho has its single nonzero entry sign[rho] in row target[rho].
class SignedPermutation {
public:
    SignedPermutation() = default;
    static SignedPermutation identity(std::size_t dim);
    // Validates that target is a bijection and every sign is +-1.
    SignedPermutation(std::vector<std::uint32_t> target, std::vector<std::int8_t> sign);

    std::size_t dim() const noexcept { return target_.size(); }
    std::uint32_t target(std::size_t rho) const noexcept { return target_[rho]; }
    int sign(std::size_t rho) const noexcept { return sign_[rho]; }
    std::span<const std::uint32_t> targets() const noexcept { return target_; }
    std::span<const std::int8_t> signs() const noexcept { return sign_; }

    // Matrix element S[row][col].
    int entry(std::size_t row, std::size_t col) const noexcept {
        return target_[col] == row ? sign_[col] : 0;
    }

    bool is_nonnegative() const noexcept;
    bool is_symmetric() const noexcept;

    // out = S q; q and out must not alias.
    void apply(std::span<const double> q, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> q) const;

    SignedPermutation transpose() const;

    friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;

private:
    std::vector<std::uint32_t> target_;
    std::vector<std::int8_t> sign_;
};

// Matrix product a * b (b acts first).
SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b);

// Row-major dense real matrix; used only for small operators.
class DenseOperator {
public:
    DenseOperator() = default;
    explicit DenseOperator(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}
    static DenseOperator from(const SignedPermutation& s);

    std::size_t dim() const noexcept { return dim_; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * dim_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * dim_ + c]; }
    std::span<const double> entries() const noexcept { return entries_; }

    DenseOperator transpose() const;
    // max_{r,c} |A(r,c) + A(c,r)|
    double antisymmetry_defect() const noexcept;

private:
    std::size_t dim_ = 0;
    std::vector<double> entries_;
};

DenseOperator multiply(const DenseOperator& a, const DenseOperator& b);

// 4x4 (free, one bit per site) or 16x16 (interacting, BlockState index) nonnegative permutation.
SignedPermutation from_block_rule(Model model);
// 16x16 form of either model on BlockState indices (the free model switches both colors).
SignedPermutation two_color_block_rule(Model model);

inline constexpr int kMaxLiftedBits = 24;

// Whole-layer operator acting blockwise on partition. Block dimension 4 means one
// occupation bit per site, 16 means the two-color layout of LayerConfig; the layer
// index is the packed bit pattern read as an integer.
SignedPermutation lift_to_lattice(const SignedPermutation& block_op, const BlockPartition& partition,
                                  int n_x);

inline constexpr std::size_t kMaxDenseDim = 4096;

// W = (P - P^T) / (4 eps), P = s_odd * s_even. Both inputs must be symmetric.
DenseOperator w_matrix(const SignedPermutation& s_even, const SignedPermutation& s_odd, double eps = 1.0);

// Dense 0/+-1 matrix as CSV, one row per line.
void write_operator_csv(std::ostream& out, const SignedPermutation& s);

} // namespace pca
