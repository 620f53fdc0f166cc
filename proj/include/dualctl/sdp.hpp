/*
 Copyright 2026 dualctl contributors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef DUALCTL_SDP_HPP
#define DUALCTL_SDP_HPP

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace dualctl {
namespace sdp {

/**
 * @brief Matrix that is affine in a vector of scalar decision variables.
 *
 * value(y) = constant + sum_i y_i * coef[i]
 */
class Affine {
public:
    Affine() = default;
    Affine(int rows, int cols);
    explicit Affine(const Eigen::MatrixXd& constant);

    static Affine zeros(int rows, int cols) { return Affine(rows, cols); }
    static Affine identity(int n);
    static Affine scalarVariable(int index);

    int rows() const { return static_cast<int>(constant_.rows()); }
    int cols() const { return static_cast<int>(constant_.cols()); }

    const Eigen::MatrixXd& constant() const { return constant_; }
    const std::map<int, Eigen::MatrixXd>& coefficients() const { return coef_; }

    Eigen::MatrixXd value(const Eigen::VectorXd& y) const;
    Affine transpose() const;
    Affine block(int r, int c, int nr, int nc) const;

    Affine& operator+=(const Affine& other);
    Affine& operator-=(const Affine& other);
    Affine& operator*=(double s);

    /// Adds coefficient matrix M for variable i.
    void addTerm(int index, const Eigen::MatrixXd& M);

    friend Affine operator*(const Eigen::MatrixXd& L, const Affine& a);
    friend Affine operator*(const Affine& a, const Eigen::MatrixXd& R);

private:
    Eigen::MatrixXd constant_;
    std::map<int, Eigen::MatrixXd> coef_;
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(const Affine& a);
Affine operator*(double s, Affine a);
Affine operator*(const Affine& a, double s);
Affine operator*(const Eigen::MatrixXd& L, const Affine& a);
Affine operator*(const Affine& a, const Eigen::MatrixXd& R);

/// Scalar affine expression times a constant matrix.
Affine kron(const Affine& scalar, const Eigen::MatrixXd& M);

/// Block matrix from a grid of blocks; an empty Affine marks a zero block.
Affine blocks(const std::vector<std::vector<Affine>>& grid);
Affine blockDiag(const std::vector<Affine>& diag);
/// Symmetric matrix from lower-triangular blocks (upper blocks are filled by transposes).
Affine symmetricBlocks(const std::vector<std::vector<Affine>>& lower);
/// Real embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
Affine hermitianEmbedding(const Affine& re, const Affine& im);
/// D F D with D = diag(|F_ii|^{-1/2}) over the nonzero constant diagonal; keeps the sign pattern.
Affine jacobiScaled(const Affine& F);

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string statusName(Status s);

struct Options {
    double feasibility_tol = 1e-7;
    double gap_tol = 1e-7;
    int max_iterations = 120;
    double recheck_margin = 1e-6;
    /// Normalize each block and each variable before solving. Turn off for problems
    /// that are already posed in balanced units.
    bool auto_scale = true;
    bool verbose = false;
};

struct Result {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd y;
    double objective = 0.0;
    int iterations = 0;
    /// Smallest eigenvalue of each constraint at y, divided by that block's magnitude.
    std::vector<double> relative_min_eig;
    std::string message;
};

/**
 * @brief Minimize c'y subject to a list of linear matrix inequalities F_k(y) >= margin_k I.
 */
class Problem {
public:
    /// New scalar variable; returns it as a 1x1 expression.
    Affine scalar(const std::string& name);
    /// Dense rows x cols matrix of fresh variables.
    Affine matrix(const std::string& name, int rows, int cols);
    /// Symmetric n x n matrix of fresh variables.
    Affine symmetric(const std::string& name, int n);

    int numVariables() const { return static_cast<int>(names_.size()); }
    const std::string& variableName(int i) const { return names_.at(i); }

    /// F(y) >= margin * I. F must be symmetric for every y.
    void addLmi(const Affine& F, double margin = 0.0, const std::string& label = "");
    /// F(y) <= -margin * I.
    void addNegativeLmi(const Affine& F, double margin = 0.0, const std::string& label = "");

    /// Objective: minimize the 1x1 expression (its constant is reported but not optimized).
    void minimize(const Affine& objective);

    Result solve(const Options& opts = Options()) const;

    /// Evaluates an expression at a solution vector.
    static Eigen::MatrixXd eval(const Affine& a, const Eigen::VectorXd& y) { return a.value(y); }

    struct Constraint {
        Affine F;
        double margin;
        std::string label;
    };
    const std::vector<Constraint>& constraints() const { return cons_; }

    /// Relative minimum eigenvalue of each constraint at y (same metric as Result).
    std::vector<double> check(const Eigen::VectorXd& y) const;

private:
    std::vector<std::string> names_;
    std::vector<Constraint> cons_;
    Affine objective_ = Affine(1, 1);
};

} // namespace sdp
} // namespace dualctl

#endif // DUALCTL_SDP_HPP
