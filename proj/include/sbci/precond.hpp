#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sbci/vector_ops.hpp"

namespace sbci {

/**
 * Inverse-mass preconditioner (D - E0 I)^{-1} with a sign-preserving clamp:
 * denominators whose magnitude falls below clamp_delta are replaced by
 * +/- clamp_delta (zero counts as positive), so nothing ever blows up.
 * E0 is the newest ground-state Rayleigh quotient; during a ground-state
 * solve it moves every iteration, for excited states it stays at the
 * converged value.
 */
struct GroundShiftPreconditioner {
    Vector diagonal;    // D, hartree
    double shift = 0.0; // E0, hartree
    double clamp_delta = 1e-10;

    GroundShiftPreconditioner() = default;
    GroundShiftPreconditioner(Vector d, double e0, double clamp = 1e-10)
        : diagonal(std::move(d)), shift(e0), clamp_delta(clamp) {
        if (!(clamp_delta > 0.0)) throw std::invalid_argument("clamp_delta must be positive");
    }

    double denominator(std::size_t i) const {
        const double d = diagonal[i] - shift;
        if (std::abs(d) >= clamp_delta) return d;
        return d < 0.0 ? -clamp_delta : clamp_delta;
    }

    Vector apply(const Vector& z) const {
        check_same_size(z, diagonal, "GroundShiftPreconditioner::apply");
        Vector out(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] / denominator(i);
        return out;
    }

    void update_shift(double e_new) {
        if (!std::isfinite(e_new)) throw std::invalid_argument("update_shift: E must be finite");
        shift = e_new;
    }
};

/**
 * Previously converged eigenvectors, unit norm and mutually orthogonal, with
 * their eigenvalues. Supplies the projector (1 - sum x_c x_c^T) and the
 * image-space projection used when seeds carry cached H x.
 */
class DeflationSet {
public:
    void add(Vector x, double energy) { add_with_image(std::move(x), Vector{}, energy); }

    /// Stores the converged vector together with its cached operator image.
    /// Image projection H(Pv) = Hv - sum (H x_i)(x_i . v) is then exact by
    /// linearity; without the image it falls back to the E_i x_i weighting,
    /// which is off by the converged residual times the overlap.
    void add_with_image(Vector x, Vector hx, double energy) {
        const double n = norm(x);
        if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("DeflationSet::add: vector must be unit norm");
        for (const auto& m : members_)
            if (std::abs(dot(m.x, x)) > 1e-10)
                throw std::invalid_argument("DeflationSet::add: vector not orthogonal to stored set");
        if (!hx.empty()) check_same_size(x, hx, "DeflationSet::add_with_image");
        members_.push_back({std::move(x), std::move(hx), energy});
    }

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const Vector& vector(std::size_t i) const { return members_[i].x; }
    double energy(std::size_t i) const { return members_[i].e; }

    /// v -= sum_i x_i (x_i . v)
    void project_out(Vector& v) const {
        for (const auto& m : members_) axpy(-dot(m.x, v), m.x, v);
    }

    /// Matching projection of a cached image, using the stored H x_i when
    /// available. Overlaps come from v itself so (v, Hv) stays a valid pair.
    void project_out_pair(Vector& v, Vector& hv) const {
        for (const auto& m : members_) {
            const double ov = dot(m.x, v);
            axpy(-ov, m.x, v);
            if (m.hx.empty())
                axpy(-m.e * ov, m.x, hv);
            else
                axpy(-ov, m.hx, hv);
        }
    }

private:
    struct Member {
        Vector x;
        Vector hx;  // may be empty
        double e;
    };
    std::vector<Member> members_;
};

/// Preconditioned, deflated residual: (1 - sum x_c x_c^T) (D - E0 I)^{-1} z'.
/// Deflation comes after the division, matching the printed operator order.
inline Vector precondition_and_deflate(const Vector& zres, const GroundShiftPreconditioner& pre,
                                       const DeflationSet& defl) {
    Vector out = pre.apply(zres);
    defl.project_out(out);
    return out;
}

}  // namespace sbci
