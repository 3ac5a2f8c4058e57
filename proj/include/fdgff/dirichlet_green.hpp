#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <unordered_map>

#include "domain.hpp"

namespace fdgff {

// Dirichlet Green's function of a discrete domain: G = (-Delta^D)^{-1},
// queried pointwise with on-demand column solves. Queries at boundary
// vertices return 0 by the wired-boundary extension convention.
class DirichletGreen {
  public:
    explicit DirichletGreen(const DiscreteDomain& domain) : domain_(&domain) {
        Eigen::SparseMatrix<double> negL = -domain.laplacian();
        solver_.compute(negL);
        if (solver_.info() != Eigen::Success)
            throw DomainError("Dirichlet Laplacian factorization failed");
    }

    const DiscreteDomain& domain() const { return *domain_; }

    double operator()(Vertex z, Vertex w) const {
        if (domain_->is_boundary(z) || domain_->is_boundary(w)) return 0.0;
        int i = domain_->interior_index(z);
        int j = domain_->interior_index(w);
        if (i < 0 || j < 0) throw DomainError("Green query outside domain");
        return column(j)[i];
    }

    const Eigen::VectorXd& column(int j) const {
        auto it = columns_.find(j);
        if (it != columns_.end()) return it->second;
        Eigen::VectorXd e = Eigen::VectorXd::Zero((Eigen::Index)domain_->n_interior());
        e[j] = 1.0;
        Eigen::VectorXd col = solver_.solve(e);
        return columns_.emplace(j, std::move(col)).first->second;
    }

    // Gradient of G across edge f in its second argument, first argument z.
    double grad2(Vertex z, const Edge& f) const {
        return (*this)(z, f.b) - (*this)(z, f.a);
    }
    // Double gradient across edges e (first argument) and f (second).
    double grad_grad(const Edge& e, const Edge& f) const {
        return grad2(e.b, f) - grad2(e.a, f);
    }

  private:
    const DiscreteDomain* domain_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    mutable std::unordered_map<int, Eigen::VectorXd> columns_;
};

}  // namespace fdgff
