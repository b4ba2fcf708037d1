#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Finite-dimensional operator and state engine: tensor-product spaces, dense
// operators, algebras as factor subsets or generated *-subalgebras, state
// restriction via partial trace or trace-preserving conditional expectation,
// relative entropy and the a priori probability app = exp(ent), decoherence
// predicates, and the switch-state (open/closed family) checker.

namespace mm::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class AlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double eig_cutoff = 1e-12;        // eigenvalues at or below this count as zero
    double support_leak = 1e-10;      // sigma mass allowed outside supp(rho)
    double projection = 1e-9;         // idempotency / orthogonality slack
    double state = 1e-12;             // PSD and unit-trace slack for states
    double decoherence = 1e-9;        // exact mixture-identity comparisons
    double decoherence_soft = 1e-3;   // "approximately decoherent" threshold
};

struct TensorSpace {
    std::vector<int> dims;

    TensorSpace() = default;
    explicit TensorSpace(std::vector<int> d);

    int factor_count() const { return static_cast<int>(dims.size()); }
    int dim() const;
    bool operator==(const TensorSpace& other) const { return dims == other.dims; }
    TensorSpace subspace(const std::vector<int>& factors) const;
};

// Dense helpers.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix dagger(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = 1e-10);
bool is_projection(const Matrix& a, double tol = 1e-9);

// Partial trace keeping the listed factors (sorted, distinct).
Matrix partial_trace(const Matrix& rho, const TensorSpace& space, const std::vector<int>& keep);

// Embeds an operator defined on the given factors (in ascending factor order)
// into the full space, tensoring identities elsewhere.
Matrix embed(const Matrix& op, const TensorSpace& space, const std::vector<int>& factors);

struct Operator {
    TensorSpace space;
    Matrix mat;

    Operator() = default;
    Operator(TensorSpace s, Matrix m);
};

// Direct-sum shape of a *-subalgebra: blocks of full d x d matrix algebras,
// each acting with a multiplicity.
struct AlgebraBlock {
    int dim = 0;           // d: size of the full matrix block
    int multiplicity = 0;  // m: identical copies of the block
    Matrix central_projection;
};

class AlgebraSpec {
public:
    enum class Kind { FullOnFactors, Generated };

    static AlgebraSpec full(TensorSpace space);
    static AlgebraSpec full_on_factors(TensorSpace space, std::vector<int> factors);
    static AlgebraSpec generated(TensorSpace space, std::vector<Matrix> generators,
                                 bool non_algebra_span = false);

    Kind kind() const { return kind_; }
    const TensorSpace& space() const { return space_; }
    const std::vector<int>& factors() const { return factors_; }
    const std::vector<Matrix>& generators() const { return generators_; }
    bool covers_all_factors() const;

    // True when this stands for a closed span of products that is not
    // itself an algebra; entropies then fall back to the generated closure.
    bool non_algebra_span() const { return non_algebra_span_; }

    // Hilbert-Schmidt orthonormal basis of the generated closure (unital,
    // adjoint- and product-closed).  Computed once and cached.
    const std::vector<Matrix>& closure_basis() const;
    const std::vector<AlgebraBlock>& blocks() const;

    // Trace-preserving conditional expectation onto this algebra (ambient
    // operators in, ambient operators out).
    Matrix conditional_expectation(const Matrix& x) const;

    // Membership test up to Hilbert-Schmidt residual.
    bool contains_operator(const Matrix& x, double tol = 1e-9) const;
    bool contains(const AlgebraSpec& sub, double tol = 1e-9) const;

    bool operator==(const AlgebraSpec& other) const;

private:
    struct Closure;
    const Closure& closure() const;

    Kind kind_ = Kind::FullOnFactors;
    TensorSpace space_;
    std::vector<int> factors_;
    std::vector<Matrix> generators_;
    bool non_algebra_span_ = false;
    mutable std::shared_ptr<const Closure> closure_;
};

// Span-closure of a generator list under products and adjoints; exposed as an
// AlgebraSpec whose block structure is already computed.
AlgebraSpec generate_algebra(const TensorSpace& space, const std::vector<Matrix>& generators);
AlgebraSpec generate_algebra(const std::vector<Operator>& generators);

struct AlgebraState {
    Matrix rho;          // density matrix on algebra.space()
    AlgebraSpec algebra;

    AlgebraState() = default;
    AlgebraState(Matrix density, AlgebraSpec alg, const Tolerances& tol = {});

    int dim() const { return static_cast<int>(rho.rows()); }
    double expectation(const Matrix& op) const;
};

// Restriction of a state to a subalgebra: partial trace for factor
// subalgebras (the ambient space shrinks), conditional expectation for
// generated subalgebras (the ambient space is kept, the density becomes the
// canonical density in the subalgebra).
AlgebraState restrict(const AlgebraState& state, const AlgebraSpec& sub, const Tolerances& tol = {});

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

struct EntropyDiagnostics {
    bool closure_fallback = false; // entropy taken on the closure of a non-algebra span
    bool singular = false;         // supp(sigma) not contained in supp(rho)
};

// Relative entropy ent(sigma | rho) = tr(-sigma log sigma + sigma log rho),
// evaluated on the common algebra of the two states (blockwise through the
// canonical densities for generated algebras).  Always <= 0; returns
// -infinity when the support condition fails.
double rel_entropy(const AlgebraState& sigma, const AlgebraState& rho,
                   const Tolerances& tol = {}, EntropyDiagnostics* diag = nullptr);

// A priori probability app = exp(ent) in [0, 1]; both states are first
// restricted to the given algebra.
double app(const AlgebraState& sigma, const AlgebraState& rho, const AlgebraSpec& algebra,
           const Tolerances& tol = {}, EntropyDiagnostics* diag = nullptr);

// app on the states' own algebra.
double app(const AlgebraState& sigma, const AlgebraState& rho, const Tolerances& tol = {},
           EntropyDiagnostics* diag = nullptr);

struct DecoherenceResult {
    bool decoherent = false;
    double p = 0;                    // rho(Q)
    double sigma_q = 0;              // sigma(Q), 1 for an exact mixture
    double sigma_d_q = 0;            // sigma_d(Q), 0 for an exact mixture
    double max_basis_residual = 0;   // worst |rho(QB) - rho(Q) sigma(B)| over a basis
    bool tail_state_valid = false;   // (rho - p sigma)/(1-p) is a state
};

// Tests rho = p sigma + (1-p) sigma_d with sigma(Q) ~ 1 and sigma_d(Q) ~ 0,
// including the dual identities rho(QB) = rho(BQ) = rho(Q) sigma(B) over an
// operator basis of the algebra.  delta widens the ~ comparisons; the exact
// form uses tol.decoherence.
DecoherenceResult is_decoherent(const AlgebraState& rho, const AlgebraState& sigma,
                                const Matrix& q, const AlgebraSpec& algebra,
                                double delta, const Tolerances& tol = {});
DecoherenceResult is_decoherent(const AlgebraState& rho, const AlgebraState& sigma,
                                const Matrix& q, const AlgebraSpec& algebra,
                                const Tolerances& tol = {});

// Coherence of pure states: rho(P) = 0 and app(sigma|rho) > 0 imply
// sigma(P) = 0.  Returns whether the implication held.
bool purity_property_check(const AlgebraState& rho, const AlgebraState& sigma,
                           const Matrix& p, const AlgebraSpec& algebra,
                           const Tolerances& tol = {});

struct ProjectionPair {
    Matrix open_projection;   // P
    Matrix closed_projection; // Q, orthogonal to P

    ProjectionPair() = default;
    ProjectionPair(Matrix p, Matrix q, const Tolerances& tol = {});
};

// Registry used by geometry manifestations, which refer to pairs by index.
class ProjectionRegistry {
public:
    int add(ProjectionPair pair);
    const ProjectionPair& at(int index) const;
    bool valid_index(int index) const;
    int size() const { return static_cast<int>(pairs_.size()); }

private:
    std::vector<ProjectionPair> pairs_;
};

// Largest expectation gap max_P |sigma(P) - sigma'(P)| over projections in
// the algebra; equals half the trace norm of the conditional expectation of
// the density difference.
double max_projection_gap(const AlgebraState& a, const AlgebraState& b,
                          const AlgebraSpec& algebra);

struct SwitchStateFamily {
    std::vector<AlgebraState> states; // one per determination, in order
    std::vector<int> statuses;        // +1 open, -1 closed, per determination
};

struct SwitchClauseReport {
    std::string clause;
    bool pass = true;
    std::string detail;
};

struct SwitchStateReport {
    std::vector<SwitchClauseReport> clauses;
    bool pass = true;
};

// Switch-state constraints: open states weight P above 1/2, closed states
// weight Q above 1/2, cross-status gaps exceed 1/2 in both P and Q, no
// projection separates same-status states by 1/2 or more, and the same bound
// against the two partner states when given (homogeneity across switches).
SwitchStateReport check_switch_states(const SwitchStateFamily& family, const ProjectionPair& pair,
                const std::vector<AlgebraState>& theta_partner = {},
                const Tolerances& tol = {});

// Convenience constructors.
Matrix identity(int dim);
Matrix ket_bra(const Vector& a, const Vector& b);
Vector basis_ket(int dim, int index);

} // namespace mm::quantum
