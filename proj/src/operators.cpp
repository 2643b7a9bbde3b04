#include "pca/operators.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace pca {

SignedPermutation SignedPermutation::identity(std::size_t dim) {
    SignedPermutation s;
    s.target_.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) s.target_[i] = static_cast<std::uint32_t>(i);
    s.sign_.assign(dim, 1);
    return s;
}

SignedPermutation::SignedPermutation(std::vector<std::uint32_t> target, std::vector<std::int8_t> sign)
    : target_(std::move(target)), sign_(std::move(sign)) {
    if (target_.size() != sign_.size()) throw DimensionMismatch("target and sign lengths differ");
    std::vector<bool> hit(target_.size(), false);
    for (std::size_t i = 0; i < target_.size(); ++i) {
        if (target_[i] >= target_.size() || hit[target_[i]]) {
            throw std::invalid_argument("signed permutation target is not a bijection");
        }
        hit[target_[i]] = true;
        if (sign_[i] != 1 && sign_[i] != -1) throw std::invalid_argument("signed permutation sign must be +-1");
    }
}

bool SignedPermutation::is_nonnegative() const noexcept {
    for (auto s : sign_) {
        if (s < 0) return false;
    }
    return true;
}

bool SignedPermutation::is_symmetric() const noexcept {
    for (std::size_t c = 0; c < dim(); ++c) {
        const std::uint32_t r = target_[c];
        if (target_[r] != c || sign_[r] != sign_[c]) return false;
    }
    return true;
}

void SignedPermutation::apply(std::span<const double> q, std::span<double> out) const {
    if (q.size() != dim() || out.size() != dim()) throw DimensionMismatch("vector length != operator dim");
    for (std::size_t rho = 0; rho < dim(); ++rho) {
        out[target_[rho]] = sign_[rho] * q[rho];
    }
}

std::vector<double> SignedPermutation::apply(std::span<const double> q) const {
    std::vector<double> out(q.size());
    apply(q, out);
    return out;
}

SignedPermutation SignedPermutation::transpose() const {
    SignedPermutation t;
    t.target_.resize(dim());
    t.sign_.resize(dim());
    for (std::size_t c = 0; c < dim(); ++c) {
        t.target_[target_[c]] = static_cast<std::uint32_t>(c);
        t.sign_[target_[c]] = sign_[c];
    }
    return t;
}

SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("compose: dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    std::vector<std::uint32_t> target(a.dim());
    std::vector<std::int8_t> sign(a.dim());
    for (std::size_t rho = 0; rho < b.dim(); ++rho) {
        const std::uint32_t mid = b.target(rho);
        target[rho] = a.target(mid);
        sign[rho] = static_cast<std::int8_t>(a.sign(mid) * b.sign(rho));
    }
    return SignedPermutation(std::move(target), std::move(sign));
}

DenseOperator DenseOperator::from(const SignedPermutation& s) {
    if (s.dim() > kMaxDenseDim) throw InvalidSpec("operator too large for dense form");
    DenseOperator d(s.dim());
    for (std::size_t c = 0; c < s.dim(); ++c) d(s.target(c), c) = s.sign(c);
    return d;
}

DenseOperator DenseOperator::transpose() const {
    DenseOperator t(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double DenseOperator::antisymmetry_defect() const noexcept {
    double m = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) m = std::max(m, std::abs((*this)(r, c) + (*this)(c, r)));
    return m;
}

DenseOperator multiply(const DenseOperator& a, const DenseOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("multiply: dim mismatch");
    const std::size_t n = a.dim();
    DenseOperator out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const double v = a(r, k);
            if (v == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += v * b(k, c);
        }
    return out;
}

SignedPermutation from_block_rule(Model model) {
    if (model == Model::free) {
        std::vector<std::uint32_t> target(4);
        for (unsigned s = 0; s < 4; ++s) target[s] = block_update_free(s);
        return SignedPermutation(std::move(target), std::vector<std::int8_t>(4, 1));
    }
    return two_color_block_rule(Model::interacting);
}

SignedPermutation two_color_block_rule(Model model) {
    const BlockRuleTable& t = block_rule_table(model);
    std::vector<std::uint32_t> target(t.begin(), t.end());
    return SignedPermutation(std::move(target), std::vector<std::int8_t>(16, 1));
}

SignedPermutation lift_to_lattice(const SignedPermutation& block_op, const BlockPartition& partition, int n_x) {
    require_valid_n_x(n_x);
    int bits_per_site = 0;
    if (block_op.dim() == 4) {
        bits_per_site = 1;
    } else if (block_op.dim() == 16) {
        bits_per_site = 2;
    } else {
        throw DimensionMismatch("block operator must be 4x4 or 16x16");
    }
    if (static_cast<int>(partition.pairs.size()) * 2 != n_x) {
        throw DimensionMismatch("partition does not match n_x");
    }
    const int total_bits = bits_per_site * n_x;
    if (total_bits > kMaxLiftedBits) {
        throw InvalidSpec("state space 2^" + std::to_string(total_bits) + " exceeds 2^" +
                          std::to_string(kMaxLiftedBits));
    }
    const std::uint32_t dim = std::uint32_t{1} << total_bits;
    const std::uint32_t site_mask = (1u << bits_per_site) - 1u;

    std::vector<std::uint32_t> target(dim);
    std::vector<std::int8_t> sign(dim);
    for (std::uint32_t rho = 0; rho < dim; ++rho) {
        std::uint32_t out = rho;
        int s = 1;
        for (const SitePair& p : partition.pairs) {
            const int sl = p.left * bits_per_site;
            const int sr = p.right * bits_per_site;
            const std::uint32_t block = ((rho >> sl) & site_mask) | (((rho >> sr) & site_mask) << bits_per_site);
            const std::uint32_t next = block_op.target(block);
            s *= block_op.sign(block);
            out &= ~((site_mask << sl) | (site_mask << sr));
            out |= ((next & site_mask) << sl) | (((next >> bits_per_site) & site_mask) << sr);
        }
        target[rho] = out;
        sign[rho] = static_cast<std::int8_t>(s);
    }
    return SignedPermutation(std::move(target), std::move(sign));
}

DenseOperator w_matrix(const SignedPermutation& s_even, const SignedPermutation& s_odd, double eps) {
    if (!s_even.is_symmetric() || !s_odd.is_symmetric()) {
        throw std::invalid_argument("w_matrix requires symmetric step evolution operators");
    }
    if (s_even.dim() > kMaxDenseDim) throw InvalidSpec("w_matrix: operator too large for dense form");
    const SignedPermutation p = compose(s_odd, s_even);
    DenseOperator w(p.dim());
    const double scale = 1.0 / (4.0 * eps);
    for (std::size_t c = 0; c < p.dim(); ++c) {
        w(p.target(c), c) += scale * p.sign(c);
        w(c, p.target(c)) -= scale * p.sign(c);
    }
    return w;
}

void write_operator_csv(std::ostream& out, const SignedPermutation& s) {
    for (std::size_t r = 0; r < s.dim(); ++r) {
        for (std::size_t c = 0; c < s.dim(); ++c) {
            if (c) out << ',';
            out << s.entry(r, c);
        }
        out << '\n';
    }
}

} // namespace pca
