#include "manyminds/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mm::quantum {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t& x) {
    return static_cast<double>(splitmix(x) >> 11) * 0x1.0p-53;
}

Eigen::VectorXcd vec(const Matrix& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Matrix unvec(const Eigen::VectorXcd& v, int rows, int cols) {
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
    return (a.adjoint() * b).trace();
}

} // namespace

TensorSpace::TensorSpace(std::vector<int> d) : dims(std::move(d)) {
    if (dims.empty()) throw std::invalid_argument("tensor space needs at least one factor");
    for (int v : dims)
        if (v < 1) throw std::invalid_argument("factor dimensions must be positive");
}

int TensorSpace::dim() const {
    int p = 1;
    for (int v : dims) p *= v;
    return p;
}

TensorSpace TensorSpace::subspace(const std::vector<int>& factors) const {
    std::vector<int> d;
    d.reserve(factors.size());
    for (int f : factors) {
        if (f < 0 || f >= factor_count()) throw std::invalid_argument("factor index out of range");
        d.push_back(dims[f]);
    }
    return TensorSpace(std::move(d));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix dagger(const Matrix& a) { return a.adjoint(); }

bool is_hermitian(const Matrix& a, double tol) {
    return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

bool is_projection(const Matrix& a, double tol) {
    return is_hermitian(a, tol) && (a * a - a).norm() <= tol * std::max(1.0, a.norm());
}

namespace {

struct FactorSplit {
    std::vector<int> keep_index;  // per full index: combined index over kept factors
    std::vector<int> rest_index;  // per full index: combined index over the rest
    int keep_dim = 1;
    int rest_dim = 1;
};

FactorSplit split_indices(const TensorSpace& space, const std::vector<int>& keep) {
    const int f = space.factor_count();
    std::vector<bool> kept(f, false);
    int prev = -1;
    for (int k : keep) {
        if (k < 0 || k >= f) throw std::invalid_argument("factor index out of range");
        if (k <= prev) throw std::invalid_argument("kept factors must be sorted and distinct");
        kept[k] = true;
        prev = k;
    }
    FactorSplit s;
    for (int i = 0; i < f; ++i) (kept[i] ? s.keep_dim : s.rest_dim) *= space.dims[i];
    const int dim = space.dim();
    s.keep_index.resize(dim);
    s.rest_index.resize(dim);
    for (int idx = 0; idx < dim; ++idx) {
        int rem = idx, ki = 0, ri = 0;
        for (int i = 0; i < f; ++i) {
            int stride = 1;
            for (int j = i + 1; j < f; ++j) stride *= space.dims[j];
            int digit = rem / stride;
            rem %= stride;
            if (kept[i]) ki = ki * space.dims[i] + digit;
            else ri = ri * space.dims[i] + digit;
        }
        s.keep_index[idx] = ki;
        s.rest_index[idx] = ri;
    }
    return s;
}

} // namespace

Matrix partial_trace(const Matrix& rho, const TensorSpace& space, const std::vector<int>& keep) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw std::invalid_argument("density size does not match tensor space");
    FactorSplit s = split_indices(space, keep);
    Matrix out = Matrix::Zero(s.keep_dim, s.keep_dim);
    const int dim = space.dim();
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (s.rest_index[r] == s.rest_index[c])
                out(s.keep_index[r], s.keep_index[c]) += rho(r, c);
    return out;
}

Matrix embed(const Matrix& op, const TensorSpace& space, const std::vector<int>& factors) {
    FactorSplit s = split_indices(space, factors);
    if (op.rows() != s.keep_dim || op.cols() != s.keep_dim)
        throw std::invalid_argument("operator size does not match selected factors");
    const int dim = space.dim();
    Matrix out = Matrix::Zero(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (s.rest_index[r] == s.rest_index[c])
                out(r, c) = op(s.keep_index[r], s.keep_index[c]);
    return out;
}

Operator::Operator(TensorSpace s, Matrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("operators must be square");
    if (mat.rows() != space.dim()) throw std::invalid_argument("operator size does not match tensor space");
}

// ---------------------------------------------------------------------------
// AlgebraSpec

struct AlgebraSpec::Closure {
    std::vector<Matrix> basis;       // Hilbert-Schmidt orthonormal
    std::vector<AlgebraBlock> blocks;
};

AlgebraSpec AlgebraSpec::full(TensorSpace space) {
    std::vector<int> all(space.factor_count());
    std::iota(all.begin(), all.end(), 0);
    return full_on_factors(std::move(space), std::move(all));
}

AlgebraSpec AlgebraSpec::full_on_factors(TensorSpace space, std::vector<int> factors) {
    std::sort(factors.begin(), factors.end());
    if (std::adjacent_find(factors.begin(), factors.end()) != factors.end())
        throw std::invalid_argument("factor list must be distinct");
    for (int f : factors)
        if (f < 0 || f >= space.factor_count()) throw std::invalid_argument("factor index out of range");
    AlgebraSpec a;
    a.kind_ = Kind::FullOnFactors;
    a.space_ = std::move(space);
    a.factors_ = std::move(factors);
    return a;
}

AlgebraSpec AlgebraSpec::generated(TensorSpace space, std::vector<Matrix> generators,
                                   bool non_algebra_span) {
    if (generators.empty()) throw std::invalid_argument("generated algebra needs at least one generator");
    for (const Matrix& g : generators)
        if (g.rows() != space.dim() || g.cols() != space.dim())
            throw std::invalid_argument("generator size does not match tensor space");
    AlgebraSpec a;
    a.kind_ = Kind::Generated;
    a.space_ = std::move(space);
    a.generators_ = std::move(generators);
    a.non_algebra_span_ = non_algebra_span;
    return a;
}

bool AlgebraSpec::covers_all_factors() const {
    return kind_ == Kind::FullOnFactors &&
           static_cast<int>(factors_.size()) == space_.factor_count();
}

namespace {

// Appends the component of `candidate` orthogonal to the current basis when
// it is numerically independent.  Returns true when the basis grew.
bool grow_basis(std::vector<Matrix>& basis, const Matrix& candidate, double tol) {
    double scale = candidate.norm();
    if (scale <= tol) return false;
    Matrix v = candidate;
    for (int pass = 0; pass < 2; ++pass)
        for (const Matrix& b : basis) v -= hs_inner(b, v) * b;
    if (v.norm() <= tol * std::max(1.0, scale)) return false;
    basis.push_back(v / v.norm());
    return true;
}

} // namespace

const AlgebraSpec::Closure& AlgebraSpec::closure() const {
    if (closure_) return *closure_;

    auto cl = std::make_shared<Closure>();
    const int dim = space_.dim();
    const double tol = 1e-10;

    std::vector<Matrix> seed;
    if (kind_ == Kind::FullOnFactors) {
        // Matrix units on the selected factors, embedded.
        TensorSpace sub = space_.subspace(factors_);
        const int sd = sub.dim();
        for (int i = 0; i < sd; ++i)
            for (int j = 0; j < sd; ++j) {
                Matrix unit = Matrix::Zero(sd, sd);
                unit(i, j) = 1.0;
                seed.push_back(embed(unit, space_, factors_));
            }
    } else {
        seed.push_back(Matrix::Identity(dim, dim));
        for (const Matrix& g : generators_) {
            seed.push_back(g);
            seed.push_back(g.adjoint());
        }
    }

    std::vector<Matrix>& basis = cl->basis;
    for (const Matrix& m : seed) grow_basis(basis, m, tol);

    if (kind_ == Kind::Generated) {
        bool grew = true;
        while (grew) {
            grew = false;
            const std::size_t n = basis.size();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (grow_basis(basis, basis[i] * basis[j], tol)) grew = true;
                    if (basis.size() >= static_cast<std::size_t>(dim) * dim) { grew = false; break; }
                }
            if (basis.size() >= static_cast<std::size_t>(dim) * dim) break;
        }
    }

    // Block structure: commutant -> center -> eigenprojections of a generic
    // Hermitian central element.
    const int d2 = dim * dim;
    std::vector<Matrix> commuting_with;
    if (kind_ == Kind::Generated) {
        commuting_with = generators_;
        for (const Matrix& g : generators_) commuting_with.push_back(g.adjoint());
    } else {
        commuting_with = basis; // matrix units, already few for small factors
    }

    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(d2, d2);
    {
        Matrix id = Matrix::Identity(dim, dim);
        for (const Matrix& g : commuting_with) {
            Eigen::MatrixXcd k = kron(id, g) - kron(g.transpose(), id);
            gram += k.adjoint() * k;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gsolve(gram);
    std::vector<Matrix> commutant;
    for (int i = 0; i < d2; ++i)
        if (gsolve.eigenvalues()[i] <= 1e-9)
            grow_basis(commutant, unvec(gsolve.eigenvectors().col(i), dim, dim), tol);

    // Center: intersection of the algebra span with its commutant.
    Eigen::MatrixXcd va(d2, static_cast<int>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) va.col(static_cast<int>(i)) = vec(basis[i]);
    Eigen::MatrixXcd vc(d2, static_cast<int>(commutant.size()));
    for (std::size_t i = 0; i < commutant.size(); ++i) vc.col(static_cast<int>(i)) = vec(commutant[i]);
    Eigen::MatrixXcd pa = va * va.adjoint();
    Eigen::MatrixXcd pc = vc * vc.adjoint();
    Eigen::MatrixXcd inter = pc * pa * pc;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> isolve(inter);
    std::vector<Matrix> center;
    for (int i = 0; i < d2; ++i)
        if (isolve.eigenvalues()[i] >= 1.0 - 1e-8)
            center.push_back(unvec(isolve.eigenvectors().col(i), dim, dim));

    std::vector<AlgebraBlock>& blocks = cl->blocks;
    for (int attempt = 0; attempt < 8 && blocks.empty(); ++attempt) {
        std::uint64_t st = 0xD1B54A32D192ED03ull + static_cast<std::uint64_t>(attempt);
        Matrix h = Matrix::Zero(dim, dim);
        for (const Matrix& z : center) {
            Complex c(unit_double(st) - 0.5, unit_double(st) - 0.5);
            h += c * z;
        }
        h = (h + Matrix(h.adjoint())).eval() * 0.5;
        Eigen::SelfAdjointEigenSolver<Matrix> hsolve(h);
        const auto& ev = hsolve.eigenvalues();
        double scale = std::max(1.0, std::abs(ev[dim - 1]) + std::abs(ev[0]));

        std::vector<std::pair<int, int>> clusters; // [first, last] eigenvalue index
        int start = 0;
        for (int i = 1; i <= dim; ++i) {
            if (i == dim || ev[i] - ev[i - 1] > 1e-7 * scale) {
                clusters.emplace_back(start, i - 1);
                start = i;
            }
        }

        std::vector<AlgebraBlock> candidate;
        bool ok = true;
        for (auto [lo, hi] : clusters) {
            AlgebraBlock blk;
            int rank = hi - lo + 1;
            Matrix p = Matrix::Zero(dim, dim);
            for (int i = lo; i <= hi; ++i)
                p += hsolve.eigenvectors().col(i) * hsolve.eigenvectors().col(i).adjoint();
            blk.central_projection = p;
            // Dimension of the compressed algebra p A p determines d.
            std::vector<Matrix> compressed;
            for (const Matrix& b : basis) grow_basis(compressed, p * b * p, tol);
            int adim = static_cast<int>(compressed.size());
            int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(adim))));
            if (d * d != adim || d == 0 || rank % d != 0) { ok = false; break; }
            blk.dim = d;
            blk.multiplicity = rank / d;
            candidate.push_back(std::move(blk));
        }
        if (ok) blocks = std::move(candidate);
    }
    if (blocks.empty())
        throw AlgebraError("failed to resolve the block structure of the algebra");

    closure_ = std::move(cl);
    return *closure_;
}

const std::vector<Matrix>& AlgebraSpec::closure_basis() const { return closure().basis; }
const std::vector<AlgebraBlock>& AlgebraSpec::blocks() const { return closure().blocks; }

Matrix AlgebraSpec::conditional_expectation(const Matrix& x) const {
    if (x.rows() != space_.dim() || x.cols() != space_.dim())
        throw std::invalid_argument("operator size does not match algebra space");
    if (kind_ == Kind::FullOnFactors) {
        int rest_dim = 1;
        std::vector<bool> kept(space_.factor_count(), false);
        for (int f : factors_) kept[f] = true;
        for (int i = 0; i < space_.factor_count(); ++i)
            if (!kept[i]) rest_dim *= space_.dims[i];
        Matrix reduced = partial_trace(x, space_, factors_);
        return embed(reduced, space_, factors_) / static_cast<double>(rest_dim);
    }
    const auto& basis = closure_basis();
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const Matrix& b : basis) out += hs_inner(b, x) * b;
    return out;
}

bool AlgebraSpec::contains_operator(const Matrix& x, double tol) const {
    Matrix e = conditional_expectation(x);
    return (e - x).norm() <= tol * std::max(1.0, x.norm());
}

bool AlgebraSpec::contains(const AlgebraSpec& sub, double tol) const {
    if (!(space_ == sub.space_)) return false;
    if (covers_all_factors()) return true;
    if (sub.kind_ == Kind::FullOnFactors) {
        if (kind_ != Kind::FullOnFactors) return false;
        return std::includes(factors_.begin(), factors_.end(),
                             sub.factors_.begin(), sub.factors_.end());
    }
    for (const Matrix& g : sub.generators_)
        if (!contains_operator(g, tol)) return false;
    return true;
}

bool AlgebraSpec::operator==(const AlgebraSpec& other) const {
    if (kind_ != other.kind_ || !(space_ == other.space_)) return false;
    if (kind_ == Kind::FullOnFactors) return factors_ == other.factors_;
    if (generators_.size() != other.generators_.size()) return false;
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i] != other.generators_[i]) return false;
    return non_algebra_span_ == other.non_algebra_span_;
}

AlgebraSpec generate_algebra(const TensorSpace& space, const std::vector<Matrix>& generators) {
    AlgebraSpec a = AlgebraSpec::generated(space, generators);
    a.closure_basis(); // force closure and block structure now
    return a;
}

AlgebraSpec generate_algebra(const std::vector<Operator>& generators) {
    if (generators.empty()) throw std::invalid_argument("generated algebra needs at least one generator");
    std::vector<Matrix> mats;
    mats.reserve(generators.size());
    for (const Operator& g : generators) {
        if (!(g.space == generators.front().space))
            throw std::invalid_argument("generators must live on one tensor space");
        mats.push_back(g.mat);
    }
    return generate_algebra(generators.front().space, mats);
}

// ---------------------------------------------------------------------------
// States

AlgebraState::AlgebraState(Matrix density, AlgebraSpec alg, const Tolerances& tol)
    : rho(std::move(density)), algebra(std::move(alg)) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    if (rho.rows() != algebra.space().dim())
        throw std::invalid_argument("density size does not match the algebra's space");
    if ((rho - rho.adjoint()).norm() > 1e-9 * std::max(1.0, rho.norm()))
        throw std::invalid_argument("density matrix must be Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > std::max(tol.state, 1e-12 * rho.rows()) ||
        std::abs(rho.trace().imag()) > 1e-12)
        throw std::invalid_argument("density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] < -std::max(tol.state, 1e-12 * rho.rows()))
        throw std::invalid_argument("density matrix must be positive semidefinite");
}

double AlgebraState::expectation(const Matrix& op) const {
    return (rho * op).trace().real();
}

AlgebraState restrict(const AlgebraState& state, const AlgebraSpec& sub, const Tolerances& tol) {
    if (!state.algebra.contains(sub))
        throw AlgebraError("restriction target is not contained in the state's algebra");
    if (state.algebra == sub) return state;
    if (sub.kind() == AlgebraSpec::Kind::FullOnFactors) {
        Matrix reduced = partial_trace(state.rho, state.algebra.space(), sub.factors());
        TensorSpace new_space = state.algebra.space().subspace(sub.factors());
        AlgebraState out;
        out.rho = std::move(reduced);
        out.algebra = AlgebraSpec::full(new_space);
        return out;
    }
    AlgebraState out;
    out.rho = sub.conditional_expectation(state.rho);
    out.algebra = sub;
    (void)tol;
    return out;
}

namespace {

// tr(-S log S + S log R) with an explicit spectral cutoff; -inf when S has
// support outside supp(R).
double entropy_formula(const Matrix& s_raw, const Matrix& r_raw, const Tolerances& tol,
                       EntropyDiagnostics* diag) {
    if ((s_raw - r_raw).norm() == 0.0) return 0.0;
    Matrix s = 0.5 * (s_raw + Matrix(s_raw.adjoint()));
    Matrix r = 0.5 * (r_raw + Matrix(r_raw.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    Eigen::SelfAdjointEigenSolver<Matrix> er(r);

    double leak = 0;
    for (int j = 0; j < r.rows(); ++j) {
        if (er.eigenvalues()[j] > tol.eig_cutoff) continue;
        Vector v = er.eigenvectors().col(j);
        leak += std::real(Complex(v.adjoint() * s * v));
    }
    if (leak > tol.support_leak) {
        if (diag) diag->singular = true;
        return kMinusInfinity;
    }

    double ent = 0;
    for (int i = 0; i < s.rows(); ++i) {
        double si = es.eigenvalues()[i];
        if (si > tol.eig_cutoff) ent -= si * std::log(si);
    }
    for (int j = 0; j < r.rows(); ++j) {
        double rj = er.eigenvalues()[j];
        if (rj <= tol.eig_cutoff) continue;
        Vector v = er.eigenvectors().col(j);
        double weight = std::real(Complex(v.adjoint() * s * v));
        ent += weight * std::log(rj);
    }
    return std::min(ent, 0.0);
}

} // namespace

double rel_entropy(const AlgebraState& sigma, const AlgebraState& rho,
                   const Tolerances& tol, EntropyDiagnostics* diag) {
    if (!(sigma.algebra == rho.algebra))
        throw AlgebraError("relative entropy needs both states on the same algebra");
    const AlgebraSpec& alg = sigma.algebra;
    if (alg.kind() == AlgebraSpec::Kind::FullOnFactors) {
        if (alg.covers_all_factors())
            return entropy_formula(sigma.rho, rho.rho, tol, diag);
        Matrix s = partial_trace(sigma.rho, alg.space(), alg.factors());
        Matrix r = partial_trace(rho.rho, alg.space(), alg.factors());
        return entropy_formula(s, r, tol, diag);
    }
    if (alg.non_algebra_span() && diag) diag->closure_fallback = true;
    Matrix s = alg.conditional_expectation(sigma.rho);
    Matrix r = alg.conditional_expectation(rho.rho);
    return entropy_formula(s, r, tol, diag);
}

double app(const AlgebraState& sigma, const AlgebraState& rho, const AlgebraSpec& algebra,
           const Tolerances& tol, EntropyDiagnostics* diag) {
    AlgebraState s = restrict(sigma, algebra, tol);
    AlgebraState r = restrict(rho, algebra, tol);
    return std::exp(rel_entropy(s, r, tol, diag));
}

double app(const AlgebraState& sigma, const AlgebraState& rho, const Tolerances& tol,
           EntropyDiagnostics* diag) {
    return std::exp(rel_entropy(sigma, rho, tol, diag));
}

// ---------------------------------------------------------------------------
// Decoherence predicates

DecoherenceResult is_decoherent(const AlgebraState& rho, const AlgebraState& sigma,
                                const Matrix& q, const AlgebraSpec& algebra,
                                double delta, const Tolerances& tol) {
    if (!is_projection(q, tol.projection))
        throw std::invalid_argument("Q must be a projection");
    if (!algebra.contains_operator(q, std::max(tol.projection, 1e-8)))
        throw AlgebraError("Q must belong to the algebra");

    // Work with canonical densities on the algebra: the mixture identity is a
    // statement about states on the algebra, not about ambient matrices.
    Matrix rho_c, sigma_c, q_c;
    if (algebra.kind() == AlgebraSpec::Kind::FullOnFactors) {
        const TensorSpace& sp = algebra.space();
        int rest_dim = 1;
        std::vector<bool> kept(sp.factor_count(), false);
        for (int f : algebra.factors()) kept[f] = true;
        for (int i = 0; i < sp.factor_count(); ++i)
            if (!kept[i]) rest_dim *= sp.dims[i];
        rho_c = partial_trace(rho.rho, sp, algebra.factors());
        sigma_c = partial_trace(sigma.rho, sp, algebra.factors());
        q_c = partial_trace(q, sp, algebra.factors()) / static_cast<double>(rest_dim);
    } else {
        rho_c = algebra.conditional_expectation(rho.rho);
        sigma_c = algebra.conditional_expectation(sigma.rho);
        q_c = q;
    }

    DecoherenceResult res;
    res.p = (rho_c * q_c).trace().real();
    res.sigma_q = (sigma_c * q_c).trace().real();

    const double p = res.p;
    if (p < 1.0 - 1e-12) {
        Matrix tail = (rho_c - p * sigma_c) / (1.0 - p);
        Matrix h = 0.5 * (tail + Matrix(tail.adjoint()));
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        double min_eig = es.eigenvalues()[0];
        double trace_err = std::abs(tail.trace().real() - 1.0);
        res.tail_state_valid = min_eig >= -std::max(delta, 1e-9) &&
                               trace_err <= std::max(delta, 1e-9);
        res.sigma_d_q = (h * q_c).trace().real();
    } else {
        res.tail_state_valid = (rho_c - sigma_c).norm() <= std::max(delta, tol.decoherence);
        res.sigma_d_q = 0;
    }

    // Dual identities rho(QB) = rho(BQ) = rho(Q) sigma(B) for B in the algebra.
    // tr(X B) = 0 for all B in the algebra iff the conditional expectation of
    // X vanishes, so project the residual back onto the algebra before taking
    // norms (a no-op for full factor algebras).
    Matrix left = rho_c * q_c - p * sigma_c;
    Matrix right = q_c * rho_c - p * sigma_c;
    if (algebra.kind() == AlgebraSpec::Kind::Generated) {
        left = algebra.conditional_expectation(left);
        right = algebra.conditional_expectation(right);
    }
    double residual = std::max(left.norm(), right.norm());
    res.max_basis_residual = residual;

    const double gate = std::max(tol.decoherence, delta);
    res.decoherent = std::abs(res.sigma_q - 1.0) <= gate &&
                     std::abs(res.sigma_d_q) <= gate &&
                     res.tail_state_valid &&
                     residual <= std::max(tol.decoherence, 10.0 * delta);
    return res;
}

DecoherenceResult is_decoherent(const AlgebraState& rho, const AlgebraState& sigma,
                                const Matrix& q, const AlgebraSpec& algebra,
                                const Tolerances& tol) {
    return is_decoherent(rho, sigma, q, algebra, tol.decoherence, tol);
}

bool purity_property_check(const AlgebraState& rho, const AlgebraState& sigma,
                           const Matrix& p, const AlgebraSpec& algebra,
                           const Tolerances& tol) {
    if (!is_projection(p, tol.projection))
        throw std::invalid_argument("P must be a projection");
    if (!algebra.contains_operator(p, std::max(tol.projection, 1e-8)))
        throw AlgebraError("P must belong to the algebra");
    double rho_p = rho.expectation(p);
    double a = app(sigma, rho, algebra, tol);
    if (rho_p > 1e-10 || a <= 1e-12) return true; // implication vacuous
    return sigma.expectation(p) <= 1e-8;
}

// ---------------------------------------------------------------------------
// Projection pairs and switch-state constraints

ProjectionPair::ProjectionPair(Matrix p, Matrix q, const Tolerances& tol)
    : open_projection(std::move(p)), closed_projection(std::move(q)) {
    if (open_projection.rows() != closed_projection.rows() ||
        open_projection.cols() != closed_projection.cols())
        throw std::invalid_argument("projection pair must act on one space");
    if (!is_projection(open_projection, tol.projection) ||
        !is_projection(closed_projection, tol.projection))
        throw std::invalid_argument("projection pair members must be projections");
    Matrix pq = open_projection * closed_projection;
    Matrix qp = closed_projection * open_projection;
    if (pq.norm() > tol.projection || qp.norm() > tol.projection)
        throw std::invalid_argument("projection pair members must be orthogonal");
}

int ProjectionRegistry::add(ProjectionPair pair) {
    pairs_.push_back(std::move(pair));
    return static_cast<int>(pairs_.size()) - 1;
}

const ProjectionPair& ProjectionRegistry::at(int index) const {
    if (!valid_index(index)) throw std::out_of_range("projection pair index out of range");
    return pairs_[static_cast<std::size_t>(index)];
}

bool ProjectionRegistry::valid_index(int index) const {
    return index >= 0 && index < static_cast<int>(pairs_.size());
}

double max_projection_gap(const AlgebraState& a, const AlgebraState& b,
                          const AlgebraSpec& algebra) {
    Matrix da, db;
    if (algebra.kind() == AlgebraSpec::Kind::FullOnFactors) {
        da = partial_trace(a.rho, algebra.space(), algebra.factors());
        db = partial_trace(b.rho, algebra.space(), algebra.factors());
    } else {
        da = algebra.conditional_expectation(a.rho);
        db = algebra.conditional_expectation(b.rho);
    }
    Matrix diff = 0.5 * ((da - db) + Matrix((da - db).adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    double gap = 0;
    for (int i = 0; i < diff.rows(); ++i)
        if (es.eigenvalues()[i] > 0) gap += es.eigenvalues()[i];
    return gap;
}

SwitchStateReport check_switch_states(const SwitchStateFamily& family, const ProjectionPair& pair,
                const std::vector<AlgebraState>& theta_partner, const Tolerances& tol) {
    (void)tol;
    SwitchStateReport report;
    auto add = [&report](const std::string& clause, bool pass, const std::string& detail) {
        report.clauses.push_back({clause, pass, detail});
        report.pass = report.pass && pass;
    };
    const std::size_t k = family.states.size();
    if (family.statuses.size() != k)
        throw std::invalid_argument("one status per determination state is required");
    if (k == 0) throw std::invalid_argument("switch state family is empty");

    const Matrix& p = pair.open_projection;
    const Matrix& q = pair.closed_projection;

    bool f1 = true, f2 = true;
    std::string f1_detail, f2_detail;
    for (std::size_t i = 0; i < k; ++i) {
        double vp = family.states[i].expectation(p);
        double vq = family.states[i].expectation(q);
        if (family.statuses[i] > 0 && !(vp > 0.5)) {
            f1 = false;
            f1_detail = "open state " + std::to_string(i) + " has P weight " + std::to_string(vp);
        }
        if (family.statuses[i] < 0 && !(vq > 0.5)) {
            f2 = false;
            f2_detail = "closed state " + std::to_string(i) + " has Q weight " + std::to_string(vq);
        }
    }
    add("open-weight", f1, f1_detail);
    add("closed-weight", f2, f2_detail);

    bool f3 = true;
    std::string f3_detail;
    for (std::size_t i = 0; i < k && f3; ++i)
        for (std::size_t j = i + 1; j < k && f3; ++j) {
            if (family.statuses[i] * family.statuses[j] >= 0) continue;
            double gp = std::abs(family.states[i].expectation(p) - family.states[j].expectation(p));
            double gq = std::abs(family.states[i].expectation(q) - family.states[j].expectation(q));
            if (!(gp > 0.5) || !(gq > 0.5)) {
                f3 = false;
                f3_detail = "cross-status pair (" + std::to_string(i) + "," + std::to_string(j) +
                            ") separates by only P:" + std::to_string(gp) + " Q:" + std::to_string(gq);
            }
        }
    add("cross-separation", f3, f3_detail);

    bool f4 = true;
    std::string f4_detail;
    for (std::size_t i = 0; i < k && f4; ++i)
        for (std::size_t j = i + 1; j < k && f4; ++j) {
            if (family.statuses[i] * family.statuses[j] <= 0) continue;
            double gap = max_projection_gap(family.states[i], family.states[j],
                                            family.states[i].algebra);
            if (gap >= 0.5) {
                f4 = false;
                f4_detail = "same-status pair (" + std::to_string(i) + "," + std::to_string(j) +
                            ") admits a separating projection with gap " + std::to_string(gap);
            }
        }
    add("same-status-spread", f4, f4_detail);

    bool f5 = true;
    std::string f5_detail;
    if (!theta_partner.empty()) {
        if (theta_partner.size() < 2 || k < 2)
            throw std::invalid_argument("homogeneity check needs two partner states and two own states");
        for (int s = 0; s < 2; ++s) {
            double gap = max_projection_gap(family.states[static_cast<std::size_t>(s)],
                                            theta_partner[static_cast<std::size_t>(s)],
                                            family.states[static_cast<std::size_t>(s)].algebra);
            if (gap >= 0.5) {
                f5 = false;
                f5_detail = "state " + std::to_string(s) + " differs from its partner by " +
                            std::to_string(gap);
            }
        }
    } else {
        f5_detail = "no partner supplied";
    }
    add("homogeneity", f5, f5_detail);
    return report;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix ket_bra(const Vector& a, const Vector& b) { return a * b.adjoint(); }

Vector basis_ket(int dim, int index) {
    Vector v = Vector::Zero(dim);
    v[index] = 1.0;
    return v;
}

} // namespace mm::quantum
