#pragma once

// Dense kernels on small square matrices (dim <= 16): general eigenvalues,
// symmetric eigenvalues, singular values, matrix exponential, LU-based
// solves. Everything is plain double precision and value semantics; no
// attempt is made to scale past small dimensions.

#include <complex>
#include <initializer_list>
#include <vector>

namespace entrex::smallalg {

inline constexpr int kMaxDim = 16;

/// Square matrix, row-major storage.
class Mat {
  public:
    Mat() = default;
    explicit Mat(int dim, double fill = 0.0);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int dim);

    int dim() const { return dim_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Mat transpose() const;
    double trace() const;
    double norm_inf() const;   // max row sum
    double norm_fro() const;
    bool all_finite() const;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator*(const Mat& a, const Mat& b);

  private:
    int dim_ = 0;
    std::vector<double> a_;
};

std::vector<double> operator*(const Mat& a, const std::vector<double>& x);

/// Eigenvalues with multiplicity, sorted by descending real part,
/// ties broken by descending imaginary part.
struct Spectrum {
    std::vector<std::complex<double>> values;
    bool converged = true;
};

/// Nonnegative, descending.
struct SingularValues {
    std::vector<double> values;
};

/// All eigenvalues of a general real matrix. Closed form for dim <= 2,
/// Hessenberg reduction plus Francis double-shift QR for dim >= 3.
/// On iteration-cap exhaustion the flag is false and the current
/// approximations are returned; callers decide whether to resample.
Spectrum eigenvalues(const Mat& m);

/// Largest eigenvalue of (M + M^T)/2, by cyclic Jacobi rotations.
double sym_eigen_max(const Mat& m);

/// All eigenvalues of a symmetric matrix (input is symmetrized), descending.
std::vector<double> sym_eigenvalues(const Mat& m);

/// Singular values as square roots of the eigenvalues of M^T M.
SingularValues singular_values(const Mat& m);

/// Matrix exponential by scaling-and-squaring with a (6,6) Pade approximant.
/// Throws std::range_error when the norm exceeds 1e3.
Mat expm(const Mat& m);

/// Determinant via LU with partial pivoting.
double det(const Mat& m);

/// Solve A x = b via LU with partial pivoting. Throws InvalidInput when singular.
std::vector<double> lu_solve(const Mat& a, const std::vector<double>& b);

}  // namespace entrex::smallalg
