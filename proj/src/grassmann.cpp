#include "pca/grassmann.hpp"

#include <bit>
#include <sstream>

namespace pca {

namespace {

using Mask = GrassmannElement::Mask;
using Coeff = GrassmannElement::Coeff;

void check_vars(int n_vars) {
    if (n_vars < 0 || n_vars > kMaxGrassmannVars) {
        throw InvalidSpec("Grassmann algebra supports at most " + std::to_string(kMaxGrassmannVars) +
                          " variables, got " + std::to_string(n_vars));
    }
}

void check_same(const GrassmannElement& a, const GrassmannElement& b) {
    if (a.n_vars() != b.n_vars()) {
        throw DimensionMismatch("Grassmann elements over " + std::to_string(a.n_vars()) + " and " +
                                std::to_string(b.n_vars()) + " variables");
    }
}

Mask full_mask(int m) { return m >= 32 ? ~Mask{0} : ((Mask{1} << m) - 1u); }

} // namespace

int monomial_product_sign(Mask a, Mask b) noexcept {
    if (a & b) return 0;
    int crossings = 0;
    for (Mask rest = b; rest; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        crossings += std::popcount(a >> (j + 1));
    }
    return (crossings % 2 == 0) ? 1 : -1;
}

GrassmannElement::GrassmannElement(int n_vars) : n_vars_(n_vars) { check_vars(n_vars); }

GrassmannElement GrassmannElement::scalar(int n_vars, Coeff c) {
    GrassmannElement e(n_vars);
    e.add_term(0, c);
    return e;
}

GrassmannElement GrassmannElement::variable(int n_vars, int index) { return product(n_vars, {index}); }

GrassmannElement GrassmannElement::product(int n_vars, std::initializer_list<int> indices) {
    return product(n_vars, std::vector<int>(indices));
}

GrassmannElement GrassmannElement::product(int n_vars, const std::vector<int>& indices) {
    GrassmannElement e(n_vars);
    Mask mask = 0;
    int sign = 1;
    for (int i : indices) {
        if (i < 0 || i >= n_vars) throw InvalidSpec("Grassmann variable index out of range");
        const int s = monomial_product_sign(mask, Mask{1} << i);
        if (s == 0) return e;
        sign *= s;
        mask |= Mask{1} << i;
    }
    e.add_term(mask, sign);
    return e;
}

bool GrassmannElement::is_even() const noexcept {
    for (const auto& [mask, c] : terms_) {
        if (std::popcount(mask) % 2 != 0) return false;
    }
    return true;
}

Coeff GrassmannElement::coefficient(Mask mask) const noexcept {
    auto it = terms_.find(mask);
    return it == terms_.end() ? 0 : it->second;
}

Coeff GrassmannElement::coefficient_of(std::initializer_list<int> ordered) const {
    const GrassmannElement mono = product(n_vars_, std::vector<int>(ordered));
    if (mono.is_zero()) throw InvalidSpec("coefficient_of: repeated variable");
    const auto& [mask, sign] = *mono.terms().begin();
    return coefficient(mask) * sign;
}

void GrassmannElement::add_term(Mask mask, Coeff c) {
    if (mask & ~full_mask(n_vars_)) throw InvalidSpec("monomial mask exceeds variable count");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(mask, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
    check_same(*this, o);
    for (const auto& [mask, c] : o.terms_) add_term(mask, c);
    return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
    check_same(*this, o);
    for (const auto& [mask, c] : o.terms_) add_term(mask, -c);
    return *this;
}

GrassmannElement& GrassmannElement::operator*=(Coeff c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [mask, v] : terms_) v *= c;
    return *this;
}

GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) { return multiply(a, b); }

GrassmannElement multiply(const GrassmannElement& a, const GrassmannElement& b) {
    check_same(a, b);
    GrassmannElement out(a.n_vars());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            const int s = monomial_product_sign(ma, mb);
            if (s != 0) out.add_term(ma | mb, s * ca * cb);
        }
    }
    return out;
}

GrassmannElement GrassmannElement::embedded(int n_vars_total, int offset) const {
    if (offset < 0 || n_vars_ + offset > n_vars_total) throw InvalidSpec("embedding exceeds variable count");
    GrassmannElement out(n_vars_total);
    for (const auto& [mask, c] : terms_) out.add_term(mask << offset, c);
    return out;
}

std::string GrassmannElement::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mask, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << '-';
        first = false;
        const Coeff ac = c < 0 ? -c : c;
        if (ac != 1 || mask == 0) os << ac;
        for (int i = 0; i < n_vars_; ++i) {
            if (mask & (Mask{1} << i)) os << "p" << (i + 1);
        }
    }
    return os.str();
}

GrassmannElement berezin_integrate(const GrassmannElement& e, Mask vars) {
    if (vars & ~full_mask(e.n_vars())) throw InvalidSpec("integration variables exceed variable count");
    GrassmannElement out(e.n_vars());
    for (const auto& [mask, c] : e.terms()) {
        if ((mask & vars) != vars) continue;
        Mask m = mask;
        int sign = 1;
        for (Mask rest = vars; rest; rest &= rest - 1) {
            const int i = std::countr_zero(rest);
            if (std::popcount(m & ((Mask{1} << i) - 1u)) % 2 != 0) sign = -sign;
            m &= ~(Mask{1} << i);
        }
        out.add_term(m, sign * c);
    }
    return out;
}

GrassmannElement exp_nilpotent(const GrassmannElement& a) {
    if (a.coefficient(0) != 0) throw InvalidSpec("exp_nilpotent requires a vanishing scalar part");
    GrassmannElement result = GrassmannElement::scalar(a.n_vars(), 1);
    GrassmannElement power = GrassmannElement::scalar(a.n_vars(), 1); // a^k / k!
    for (Coeff k = 1; k <= a.n_vars() + 1; ++k) {
        GrassmannElement next = multiply(power, a);
        if (next.is_zero()) break;
        GrassmannElement divided(a.n_vars());
        for (const auto& [mask, c] : next.terms()) {
            if (c % k != 0) throw ExpansionError("exp_nilpotent: non-integer coefficient");
            divided.add_term(mask, c / k);
        }
        power = std::move(divided);
        result += power;
    }
    return result;
}

BasisFamily basis_family(int m) {
    check_vars(m);
    BasisFamily f;
    f.m = m;
    const std::size_t n = std::size_t{1} << m;
    const Mask all = full_mask(m);
    f.g.reserve(n);
    f.gbar.reserve(n);
    f.gprime.reserve(n);
    f.gbarprime.reserve(n);
    for (std::size_t tau = 0; tau < n; ++tau) {
        const Mask occupied = static_cast<Mask>(tau);
        const Mask empty = all & ~occupied;
        GrassmannElement g(m);
        g.add_term(empty, 1);
        // gbar * g must equal the ascending top monomial.
        const int s = monomial_product_sign(occupied, empty);
        GrassmannElement gbar(m);
        gbar.add_term(occupied, s);

        const int mt = std::popcount(empty);
        const int mbt = std::popcount(occupied);
        f.m_tau.push_back(mt);
        f.mbar_tau.push_back(mbt);
        f.gprime.push_back(g * static_cast<Coeff>(eta_sign(mt)));
        f.gbarprime.push_back(gbar * static_cast<Coeff>(eta_sign(mbt)));
        f.g.push_back(std::move(g));
        f.gbar.push_back(std::move(gbar));
    }
    return f;
}

GrassmannElement local_factor_free(std::int64_t g, Parity parity) {
    constexpr int n = 4;
    GrassmannElement k = GrassmannElement::scalar(n, 1);
    if (parity == Parity::even) {
        // 1 + phi(t+1,x+1) phi(t,x) + phi(t+1,x) phi(t,x+1) + (1-g) phi(t+1,x+1) phi(t+1,x) phi(t,x+1) phi(t,x)
        k += GrassmannElement::product(n, {3, 0});
        k += GrassmannElement::product(n, {2, 1});
        k += GrassmannElement::product(n, {3, 2, 1, 0}) * (1 - g);
    } else {
        // Block (x-1, x): left = x-1, right = x.
        // 1 + phi(t+2,x-1) phi(t+1,x) + phi(t+2,x) phi(t+1,x-1) + (1-g) phi(t+2,x-1) phi(t+2,x) phi(t+1,x-1) phi(t+1,x)
        k += GrassmannElement::product(n, {2, 1});
        k += GrassmannElement::product(n, {3, 0});
        k += GrassmannElement::product(n, {2, 3, 0, 1}) * (1 - g);
    }
    return k;
}

namespace {
// zeta_i -> index i-1, zeta'_i -> index i+3
constexpr int z(int i) { return i - 1; }
constexpr int zp(int i) { return i + 3; }
constexpr int kInteractingVars = 8;
} // namespace

GrassmannElement interacting_kinetic_exponent() {
    // -L_kin = sum_alpha [phi_a(t+1,x+1) phi_a(t,x) + phi_a(t+1,x) phi_a(t,x+1)]
    GrassmannElement a(kInteractingVars);
    a += GrassmannElement::product(kInteractingVars, {zp(3), z(1)});
    a += GrassmannElement::product(kInteractingVars, {zp(4), z(2)});
    a += GrassmannElement::product(kInteractingVars, {zp(1), z(3)});
    a += GrassmannElement::product(kInteractingVars, {zp(2), z(4)});
    return a;
}

GrassmannElement interacting_k_int() {
    const auto p = [](std::initializer_list<int> idx) { return GrassmannElement::product(kInteractingVars, idx); };
    // (z'1 z'4 - z'2 z'3)(z1 z4 - z2 z3) - (z'1 z'3 + z'2 z'4)(z1 z3 + z2 z4)
    const GrassmannElement first =
        (p({zp(1), zp(4)}) - p({zp(2), zp(3)})) * (p({z(1), z(4)}) - p({z(2), z(3)}));
    const GrassmannElement second =
        (p({zp(1), zp(3)}) + p({zp(2), zp(4)})) * (p({z(1), z(3)}) + p({z(2), z(4)}));
    return first - second;
}

GrassmannElement local_factor_interacting() {
    return exp_nilpotent(interacting_kinetic_exponent()) + interacting_k_int();
}

std::optional<SignedPermutation> StepOperatorExtraction::unique_jump() const {
    const std::size_t n = dim();
    std::vector<std::uint32_t> target(n);
    std::vector<std::int8_t> sign(n);
    std::vector<int> row_hits(n, 0);
    for (std::size_t rho = 0; rho < n; ++rho) {
        int hits = 0;
        for (std::size_t tau = 0; tau < n; ++tau) {
            const std::int64_t v = at(tau, rho);
            if (v == 0) continue;
            if (v != 1 && v != -1) return std::nullopt;
            ++hits;
            ++row_hits[tau];
            target[rho] = static_cast<std::uint32_t>(tau);
            sign[rho] = static_cast<std::int8_t>(v);
        }
        if (hits != 1) return std::nullopt;
    }
    for (int h : row_hits) {
        if (h != 1) return std::nullopt;
    }
    return SignedPermutation(std::move(target), std::move(sign));
}

StepOperatorExtraction extract_step_operator(const GrassmannElement& k, int m, Parity parity) {
    if (m < 1 || 2 * m > kMaxGrassmannVars) throw InvalidSpec("extract_step_operator: unsupported m");
    if (k.n_vars() != 2 * m) {
        throw DimensionMismatch("local factor has " + std::to_string(k.n_vars()) + " variables, expected " +
                                std::to_string(2 * m));
    }
    const BasisFamily fam = basis_family(m);
    const Mask low = full_mask(m);
    StepOperatorExtraction out;
    out.m = m;
    out.parity = parity;
    out.eta = eta_sign(m);
    out.matrix.assign(out.dim() * out.dim(), 0);

    for (const auto& [mask, c] : k.terms()) {
        const Mask upper = (mask >> m) & low;
        const Mask lower = mask & low;
        std::size_t tau = 0, rho = 0;
        GrassmannElement basis_product;
        if (parity == Parity::even) {
            tau = upper;
            rho = lower;
            basis_product = fam.gbarprime[tau].embedded(2 * m, m) * fam.gbar[rho].embedded(2 * m, 0);
        } else {
            tau = low & ~upper;
            rho = low & ~lower;
            basis_product = fam.g[tau].embedded(2 * m, m) * fam.gprime[rho].embedded(2 * m, 0);
        }
        if (basis_product.terms().size() != 1 || basis_product.terms().begin()->first != mask) {
            throw ExpansionError("local factor monomial has no matching basis product");
        }
        const Coeff sign = basis_product.terms().begin()->second;
        out.matrix[tau * out.dim() + rho] = c * sign;
    }
    return out;
}

std::optional<SignGauge> sign_gauge_search(const SignedPermutation& s) {
    const std::size_t n = s.dim();
    SignGauge gauge;
    gauge.d_out.assign(n, 0);
    gauge.d_in.assign(n, 0);
    gauge.similarity_possible = true;
    gauge.anti_similarity_possible = true;

    std::vector<bool> visited(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        int cycle_product = 1;
        std::size_t cycle_len = 0;
        gauge.d_in[start] = 1;
        std::size_t rho = start;
        while (true) {
            visited[rho] = true;
            cycle_product *= s.sign(rho);
            ++cycle_len;
            const std::size_t tau = s.target(rho);
            gauge.d_out[tau] = static_cast<std::int8_t>(s.sign(rho) * gauge.d_in[rho]);
            if (tau == start) break;
            gauge.d_in[tau] = gauge.d_out[tau];
            rho = tau;
        }
        // D S D = |S| on this cycle iff the signs multiply to +1; D S (-D) iff (-1)^len times that is +1.
        if (cycle_product != 1) gauge.similarity_possible = false;
        if (cycle_product * ((cycle_len % 2 == 0) ? 1 : -1) != 1) gauge.anti_similarity_possible = false;
    }

    std::vector<std::uint32_t> target(s.targets().begin(), s.targets().end());
    std::vector<std::int8_t> sign(n);
    for (std::size_t rho = 0; rho < n; ++rho) {
        sign[rho] = static_cast<std::int8_t>(gauge.d_out[s.target(rho)] * s.sign(rho) * gauge.d_in[rho]);
    }
    gauge.gauged = SignedPermutation(std::move(target), std::move(sign));
    if (gauge.d_out == gauge.d_in) {
        gauge.kind = GaugeKind::similarity;
    } else {
        bool anti = true;
        for (std::size_t i = 0; i < n; ++i) anti = anti && gauge.d_out[i] == -gauge.d_in[i];
        gauge.kind = anti ? GaugeKind::anti_similarity : GaugeKind::general;
    }
    return gauge;
}

std::optional<SignGauge> sign_gauge_search(const StepOperatorExtraction& s) {
    auto uj = s.unique_jump();
    if (!uj) return std::nullopt;
    return sign_gauge_search(*uj);
}

std::string_view to_string(GaugeKind k) noexcept {
    switch (k) {
        case GaugeKind::similarity: return "similarity";
        case GaugeKind::anti_similarity: return "anti_similarity";
        case GaugeKind::general: return "general";
    }
    return "general";
}

} // namespace pca
