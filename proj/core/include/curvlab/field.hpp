#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curvlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline bool isFinitePoint(Complex s) {
    return std::isfinite(s.real()) && std::isfinite(s.imag());
}

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exponents of s and conj(s) in one monomial.
struct Bidegree {
    int j = 0;
    int k = 0;
    friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
};

enum class Deriv { S, SBar };

// Matrix-valued polynomial in s and conj(s):
//
//     F(s) = sum_{j,k} C[j,k] * s^j * conj(s)^k
//
// Coefficients live in an ordered map so that iteration, and every numeric
// reduction built on top of it, is deterministic. Holomorphic means every
// coefficient with k > 0 vanishes; Wirtinger derivatives act exactly on the
// coefficient table by the power rule.
class MatrixPolyField {
public:
    MatrixPolyField(int rows, int cols);

    static MatrixPolyField constant(const Matrix& value);
    static MatrixPolyField identity(int n);
    static MatrixPolyField scalarMonomial(int j, int k, Complex c);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool isSquare() const { return rows_ == cols_; }
    bool isColumn() const { return cols_ == 1; }

    Matrix coeff(int j, int k) const;
    void setCoeff(int j, int k, const Matrix& value);
    void addCoeff(int j, int k, const Matrix& value);
    const std::map<Bidegree, Matrix>& coeffs() const { return coeffs_; }

    bool empty() const { return coeffs_.empty(); }
    int maxTotalDegree() const;
    int maxDegreeS() const;
    int maxDegreeSBar() const;
    // Largest Frobenius norm over coefficients (0 for the zero field).
    double coeffScale() const;

    bool isHolomorphic(double tol = 0.0) const;
    // C[j,k] == adjoint(C[k,j]) within tol * max(1, coeffScale());
    // equivalent to the field being pointwise hermitian everywhere.
    bool hasHermitianSymmetricTable(double tol = 1e-12) const;

    Matrix eval(Complex s) const;
    Complex evalScalar(Complex s) const;  // requires 1x1

    MatrixPolyField derivative(Deriv which) const;
    MatrixPolyField conjugateTranspose() const;
    MatrixPolyField truncated(int maxTotalDegree) const;
    // Substitution s -> s + c (exact binomial recentring):
    // shiftedBy(c).eval(t) == eval(t + c).
    MatrixPolyField shiftedBy(Complex c) const;
    // Drops coefficients with Frobenius norm <= tol.
    MatrixPolyField pruned(double tol) const;

    MatrixPolyField operator+(const MatrixPolyField& o) const;
    MatrixPolyField operator-(const MatrixPolyField& o) const;
    MatrixPolyField operator*(const MatrixPolyField& o) const;  // matrix product
    MatrixPolyField operator*(Complex c) const;
    MatrixPolyField mulTruncated(const MatrixPolyField& o, int maxTotalDegree) const;

private:
    int rows_;
    int cols_;
    std::map<Bidegree, Matrix> coeffs_;

    void checkShapeMatch(const MatrixPolyField& o, const char* op) const;
};

inline MatrixPolyField operator*(Complex c, const MatrixPolyField& f) { return f * c; }

// 1x1 matrix holding a single value, for building scalar fields.
inline Matrix scalarMatrix(Complex c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
}

// Truncated exponential sum_{m<=order} f^m / m! of a 1x1 field. A real-valued
// input (hermitian-symmetric table) yields a real-valued result, so this is
// how transcendental weights like e^{|s|^2} enter as polynomial surrogates.
MatrixPolyField expSurrogate(const MatrixPolyField& f, int order);

// Closed axis-aligned rectangle around a center point.
struct Rect {
    Complex center;
    double halfWidthRe = 1.0;
    double halfWidthIm = 1.0;

    bool contains(Complex s, double margin = 0.0) const;
    double distanceToBoundary(Complex s) const;  // negative outside
};

// Uniform verification grid over a rectangle. Odd resolution is forced at
// construction (even input is bumped by one) so the center is always a node.
class GridDomain {
public:
    GridDomain(Complex center, double halfWidthRe, double halfWidthIm, int resolution);

    Complex center() const { return rect_.center; }
    double halfWidthRe() const { return rect_.halfWidthRe; }
    double halfWidthIm() const { return rect_.halfWidthIm; }
    int resolution() const { return resolution_; }
    const Rect& rect() const { return rect_; }

    double spacingRe() const { return 2.0 * rect_.halfWidthRe / (resolution_ - 1); }
    double spacingIm() const { return 2.0 * rect_.halfWidthIm / (resolution_ - 1); }
    double maxSpacing() const { return std::max(spacingRe(), spacingIm()); }

    long nodeCount() const { return static_cast<long>(resolution_) * resolution_; }
    Complex node(int ix, int iy) const;
    std::size_t index(int ix, int iy) const;
    bool contains(Complex s, double margin = 0.0) const { return rect_.contains(s, margin); }
    double distanceToBoundary(Complex s) const { return rect_.distanceToBoundary(s); }

    bool sameLayout(const GridDomain& o) const;

private:
    Rect rect_;
    int resolution_;
};

// Real scalar samples on a grid, with a validity mask (non-finite samples are
// masked, e.g. log 0 at a zero of a homomorphism). Row-major storage: iy
// outer, ix inner, matching the CSV export order.
class ScalarSampleField {
public:
    explicit ScalarSampleField(const GridDomain& domain);
    static ScalarSampleField sample(const GridDomain& domain,
                                    const std::function<double(Complex)>& u);

    const GridDomain& domain() const { return domain_; }
    double value(int ix, int iy) const { return values_[domain_.index(ix, iy)]; }
    bool valid(int ix, int iy) const { return mask_[domain_.index(ix, iy)] != 0; }
    void set(int ix, int iy, double v);
    void setMasked(int ix, int iy);

    long validCount() const;
    // Min / max over valid nodes; nullopt when everything is masked.
    std::optional<double> minValue() const;
    std::optional<double> maxValue() const;

    // Bilinear interpolation; nullopt outside the rectangle or when a corner
    // of the surrounding cell is masked.
    std::optional<double> interpolate(Complex s) const;

private:
    GridDomain domain_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace curvlab
