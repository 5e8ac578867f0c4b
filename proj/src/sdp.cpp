#include "qincompat/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "qincompat/sdp_kernels.hpp"

namespace qincompat::sdp {

using kernels::BlockData;

std::string to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::MaxIterations: return "max-iterations";
        case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

double Assignment::scalar(const VarHandle& h) const {
    if (h.kind != VarKind::Scalar) throw InvalidInput("Assignment: not a scalar variable");
    return x_[h.offset];
}

RealVector Assignment::scalars(const VarHandle& h) const { return x_.segment(h.offset, h.count); }

RealMatrix Assignment::symmetric(const VarHandle& h) const {
    if (h.kind != VarKind::Symmetric) throw InvalidInput("Assignment: not a symmetric variable");
    RealMatrix m(h.size, h.size);
    int k = h.offset;
    for (int j = 0; j < h.size; ++j)
        for (int i = j; i < h.size; ++i) {
            m(i, j) = x_[k];
            m(j, i) = x_[k];
            ++k;
        }
    return m;
}

RealMatrix realify_hermitian_psd(const ComplexMatrix& m) {
    const Eigen::Index n = m.rows();
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.real();
    out.bottomRightCorner(n, n) = m.real();
    out.topRightCorner(n, n) = -m.imag();
    out.bottomLeftCorner(n, n) = m.imag();
    return out;
}

VarHandle SdpProblem::add_scalar(const std::string& name) {
    VarHandle h{n_scalars_, 1, 1, VarKind::Scalar};
    n_scalars_ += 1;
    vars_.emplace_back(name, h);
    return h;
}

VarHandle SdpProblem::add_scalar_block(const std::string& name, int count) {
    if (count < 1) throw InvalidInput("add_scalar_block: count must be positive");
    VarHandle h{n_scalars_, count, count, VarKind::ScalarBlock};
    n_scalars_ += count;
    vars_.emplace_back(name, h);
    return h;
}

VarHandle SdpProblem::add_symmetric(const std::string& name, int size) {
    if (size < 1) throw InvalidInput("add_symmetric: size must be positive");
    const int count = size * (size + 1) / 2;
    VarHandle h{n_scalars_, count, size, VarKind::Symmetric};
    n_scalars_ += count;
    vars_.emplace_back(name, h);
    return h;
}

void SdpProblem::set_objective(std::function<double(const Assignment&)> fn) {
    objective_ = std::move(fn);
}

void SdpProblem::add_psd(const std::string& name, int size,
                         std::function<RealMatrix(const Assignment&)> fn) {
    psd_.push_back(PsdSpec{name, size, false, std::move(fn), nullptr});
}

void SdpProblem::add_psd_hermitian(const std::string& name, int size,
                                   std::function<ComplexMatrix(const Assignment&)> fn) {
    psd_.push_back(PsdSpec{name, size, true, nullptr, std::move(fn)});
}

void SdpProblem::add_equalities(const std::string& name, int count,
                                std::function<RealVector(const Assignment&)> fn,
                                const RealVector& rhs) {
    if (rhs.size() != count) throw InvalidInput("add_equalities: rhs size mismatch");
    eq_.push_back(EqSpec{name, count, std::move(fn), rhs});
}

namespace {

struct Compiled {
    int m = 0;  // scalar unknowns
    int p = 0;  // equality rows
    RealVector c;
    double c0 = 0.0;
    RealMatrix e;
    RealVector f;
    std::vector<BlockData> blocks;
};

// (i,j) entrywise map U -> 2 U_ij / (lam_i + lam_j), the inverse of the
// symmetrized product with diag(lam).
RealMatrix jordan_inverse(const RealVector& lam, const RealMatrix& u) {
    RealMatrix t(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j) t(i, j) = 2.0 * u(i, j) / (lam[i] + lam[j]);
    return t;
}

// sup { alpha : S + alpha dS >= 0 } given the Cholesky factor of S.
double max_step(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& ds) {
    RealMatrix t = llt.matrixL().solve(ds);
    t = llt.matrixL().solve(t.transpose()).transpose();
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(t, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

struct NtScaling {
    RealMatrix r;     // W = r r^T, W Z W = S
    RealMatrix rti;   // r^{-T}
    RealMatrix winv;  // rti rti^T
    RealVector lam;   // scaled point (diagonal)
};

struct IterWork {
    std::vector<Eigen::LLT<RealMatrix>> llt_s, llt_z;
    std::vector<NtScaling> scaling;
};

}  // namespace

SdpSolution SdpProblem::solve(const SolveOptions& opts) const {
    if (!objective_) throw InvalidInput("SdpProblem: no objective set");
    if (psd_.empty()) throw InvalidInput("SdpProblem: need at least one PSD constraint");
    if (n_scalars_ < 1) throw InvalidInput("SdpProblem: no variables");
    if (n_scalars_ > 5000) throw InvalidInput("SdpProblem: beyond desk scale (> 5000 unknowns)");

    const int m = n_scalars_;
    Compiled cp;
    cp.m = m;

    auto eval_block = [&](const PsdSpec& spec, const RealVector& x) -> RealMatrix {
        Assignment a(x);
        if (spec.hermitian) {
            ComplexMatrix v = spec.cplx_fn(a);
            if (v.rows() != spec.size || v.cols() != spec.size)
                throw InvalidInput("psd block '" + spec.name + "': wrong size");
            if ((v - v.adjoint()).norm() > 1e-10 * std::max(1.0, v.norm()))
                throw InvalidInput("psd block '" + spec.name + "': map is not Hermitian-valued");
            return realify_hermitian_psd(v);
        }
        RealMatrix v = spec.real_fn(a);
        if (v.rows() != spec.size || v.cols() != spec.size)
            throw InvalidInput("psd block '" + spec.name + "': wrong size");
        if ((v - v.transpose()).norm() > 1e-10 * std::max(1.0, v.norm()))
            throw InvalidInput("psd block '" + spec.name + "': map is not symmetric-valued");
        return 0.5 * (v + v.transpose());
    };

    // --- Probe the callables into coefficient form. -------------------------
    RealVector zero = RealVector::Zero(m);
    cp.c0 = objective_(Assignment(zero));
    cp.c.resize(m);
    RealVector probe = zero;
    for (int i = 0; i < m; ++i) {
        probe[i] = 1.0;
        cp.c[i] = objective_(Assignment(probe)) - cp.c0;
        probe[i] = 0.0;
    }

    cp.p = 0;
    for (const auto& eq : eq_) cp.p += eq.count;
    cp.e.resize(cp.p, m);
    cp.f.resize(cp.p);
    {
        int row = 0;
        for (const auto& eq : eq_) {
            RealVector e0 = eq.fn(Assignment(zero));
            if (e0.size() != eq.count)
                throw InvalidInput("equalities '" + eq.name + "': wrong count");
            for (int i = 0; i < m; ++i) {
                probe[i] = 1.0;
                cp.e.block(row, i, eq.count, 1) = eq.fn(Assignment(probe)) - e0;
                probe[i] = 0.0;
            }
            cp.f.segment(row, eq.count) = eq.rhs - e0;
            row += eq.count;
        }
    }

    // Random assignment used for the affine/symmetry verification.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RealVector xr(m);
    for (int i = 0; i < m; ++i) xr[i] = uni(rng);

    for (const auto& spec : psd_) {
        BlockData block;
        block.size = spec.hermitian ? 2 * spec.size : spec.size;
        block.constant = eval_block(spec, zero);
        RealMatrix affine_check = block.constant;
        for (int i = 0; i < m; ++i) {
            probe[i] = 1.0;
            RealMatrix ai = eval_block(spec, probe) - block.constant;
            probe[i] = 0.0;
            if (ai.cwiseAbs().maxCoeff() == 0.0) continue;
            affine_check += xr[i] * ai;
            block.coeffs.push_back(kernels::compress_coefficient(i, ai));
        }
        const double err = (eval_block(spec, xr) - affine_check).norm();
        if (err > 1e-8 * std::max(1.0, affine_check.norm()))
            throw InvalidInput("psd block '" + spec.name + "': map is not affine (residual " +
                               std::to_string(err) + ")");
        cp.blocks.push_back(std::move(block));
    }
    {
        // Equality and objective maps must be affine as well.
        double lin_err = std::abs(objective_(Assignment(xr)) - (cp.c.dot(xr) + cp.c0));
        int row = 0;
        for (const auto& eq : eq_) {
            RealVector v = eq.fn(Assignment(xr));
            lin_err += (v - (cp.e.middleRows(row, eq.count) * xr + (eq.rhs - cp.f.segment(row, eq.count)))).norm();
            row += eq.count;
        }
        if (lin_err > 1e-8 * std::max(1.0, xr.norm()))
            throw InvalidInput("SdpProblem: objective or equality map is not affine");
    }

    // --- Interior point method. ---------------------------------------------
    const int nblocks = static_cast<int>(cp.blocks.size());
    const int p = cp.p;
    double ntot = 0.0;
    for (const auto& b : cp.blocks) ntot += b.size;

    auto apply_all = [&](const RealVector& x) {
        std::vector<RealMatrix> out(nblocks);
        for (int b = 0; b < nblocks; ++b)
            out[b] = kernels::apply_map(cp.blocks[b], x) + cp.blocks[b].constant;
        return out;
    };

    // KKT solver with Jacobi equilibration (the variable scales of these
    // programs spread over many orders of magnitude near the optimum), static
    // regularization against flat estimator directions, and iterative
    // refinement of the unregularized system.
    struct KktSolver {
        RealVector scale;  // m entries
        RealMatrix h;      // unscaled
        const RealMatrix* e;
        Eigen::PartialPivLU<RealMatrix> lu;
        int m, p;

        void factor(const RealMatrix& h_in, const RealMatrix& e_in) {
            m = static_cast<int>(h_in.rows());
            p = static_cast<int>(e_in.rows());
            h = h_in;
            e = &e_in;
            scale.resize(m);
            for (int i = 0; i < m; ++i)
                scale[i] = 1.0 / std::sqrt(std::max(h_in(i, i), 1e-12));
            RealMatrix kkt = RealMatrix::Zero(m + p, m + p);
            kkt.topLeftCorner(m, m) = scale.asDiagonal() * h_in * scale.asDiagonal();
            const double delta = 1e-13 * std::max(1.0, kkt.topLeftCorner(m, m).diagonal().maxCoeff());
            kkt.topLeftCorner(m, m) += delta * RealMatrix::Identity(m, m);
            if (p > 0) {
                RealMatrix es = e_in * scale.asDiagonal();
                kkt.topRightCorner(m, p) = es.transpose();
                kkt.bottomLeftCorner(p, m) = es;
                kkt.bottomRightCorner(p, p) = -delta * RealMatrix::Identity(p, p);
            }
            lu.compute(kkt);
        }

        RealVector solve(const RealVector& top, const RealVector& bottom) const {
            RealVector rhs(m + p);
            rhs.head(m) = scale.asDiagonal() * top;
            if (p > 0) rhs.tail(p) = bottom;
            RealVector u = lu.solve(rhs);
            // refine against the unregularized scaled system
            const double rhs_norm = std::max(1.0, rhs.norm());
            RealVector resid(m + p);
            for (int pass = 0; pass < 3; ++pass) {
                RealVector du = scale.asDiagonal() * u.head(m);
                resid.head(m) = scale.asDiagonal() * (top - h * du);
                if (p > 0) {
                    resid.head(m) -= scale.asDiagonal() * (e->transpose() * u.tail(p));
                    resid.tail(p) = bottom - (*e) * du;
                }
                if (resid.norm() <= 1e-14 * rhs_norm) break;
                u += lu.solve(resid);
            }
            RealVector out(m + p);
            out.head(m) = scale.asDiagonal() * u.head(m);
            if (p > 0) out.tail(p) = u.tail(p);
            return out;
        }
    };

    SdpSolution sol;
    sol.x = RealVector::Zero(m);

    // Initial point: equality-consistent least-squares primal, identity-shifted
    // blocks, identity dual.
    RealMatrix h0 = RealMatrix::Zero(m, m);
    RealVector g0 = RealVector::Zero(m);
    {
        for (int b = 0; b < nblocks; ++b) {
            RealMatrix id = RealMatrix::Identity(cp.blocks[b].size, cp.blocks[b].size);
            kernels::schur_accumulate(cp.blocks[b], id, h0, opts.threads);
            kernels::weighted_rhs_accumulate(cp.blocks[b], cp.blocks[b].constant, g0, opts.threads);
        }
        KktSolver k0;
        k0.factor(h0, cp.e);
        RealVector s0 = k0.solve(-g0, cp.f);
        sol.x = s0.head(m);
    }
    if (p > 0 && (cp.e * sol.x - cp.f).norm() > 1e-7 * std::max(1.0, cp.f.norm())) {
        sol.status = Status::Infeasible;
        sol.message = "equality constraints are inconsistent";
        sol.objective = cp.c.dot(sol.x) + cp.c0;
        return sol;
    }

    RealVector y = RealVector::Zero(p);
    std::vector<RealMatrix> s_blocks = apply_all(sol.x);
    std::vector<RealMatrix> z_blocks(nblocks);
    const double zeta = std::max(1.0, cp.c.lpNorm<Eigen::Infinity>());
    for (int b = 0; b < nblocks; ++b) {
        const int n = cp.blocks[b].size;
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(s_blocks[b], Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin <= 0) s_blocks[b] += (1.0 - lmin) * RealMatrix::Identity(n, n);
        z_blocks[b] = zeta * RealMatrix::Identity(n, n);
    }

    const double f_scale = 1.0 + cp.f.norm();
    const double c_scale = 1.0 + cp.c.norm();
    double b_scale = 1.0;
    for (const auto& b : cp.blocks) b_scale = std::max(b_scale, b.constant.norm());

    int stall_count = 0;
    std::string fail_message;

    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        sol.iterations = iter;

        // Residuals and gap.
        RealVector adj_z = RealVector::Zero(m);
        for (int b = 0; b < nblocks; ++b)
            kernels::adjoint_accumulate(cp.blocks[b], z_blocks[b], adj_z);
        RealVector rd = cp.c - adj_z;
        if (p > 0) rd -= cp.e.transpose() * y;
        RealVector rp_eq = p > 0 ? RealVector(cp.f - cp.e * sol.x) : RealVector();

        std::vector<RealMatrix> sx = apply_all(sol.x);
        std::vector<RealMatrix> rp(nblocks);
        double prim_res = p > 0 ? rp_eq.norm() / f_scale : 0.0;
        for (int b = 0; b < nblocks; ++b) {
            rp[b] = sx[b] - s_blocks[b];
            prim_res = std::max(prim_res, rp[b].norm() / (1.0 + b_scale));
        }

        double gap = 0.0;
        for (int b = 0; b < nblocks; ++b)
            gap += (s_blocks[b].array() * z_blocks[b].array()).sum();
        const double mu = gap / ntot;

        const double pcost = cp.c.dot(sol.x) + cp.c0;
        double dcost = cp.c0;
        if (p > 0) dcost += cp.f.dot(y);
        for (int b = 0; b < nblocks; ++b)
            dcost -= (cp.blocks[b].constant.array() * z_blocks[b].array()).sum();

        const double dual_res = rd.norm() / c_scale;
        const double gap_scale = std::max({1.0, std::abs(pcost), std::abs(dcost)});

        sol.objective = pcost;
        sol.dual_objective = dcost;
        sol.duality_gap = gap;
        sol.primal_residual = prim_res;
        sol.dual_residual = dual_res;

        if (opts.verbose)
            std::fprintf(stderr, "iter %3d  pcost % .9e  dcost % .9e  gap %.3e  pres %.3e  dres %.3e\n",
                         iter, pcost, dcost, gap, prim_res, dual_res);

        if (prim_res <= opts.feas_tol && dual_res <= opts.feas_tol &&
            gap <= opts.gap_tol * gap_scale) {
            sol.status = Status::Optimal;
            break;
        }

        // Farkas-type certificate of primal infeasibility.
        {
            double znorm = y.norm();
            for (int b = 0; b < nblocks; ++b) znorm = std::hypot(znorm, z_blocks[b].norm());
            double bz = p > 0 ? -cp.f.dot(y) : 0.0;
            for (int b = 0; b < nblocks; ++b)
                bz += (cp.blocks[b].constant.array() * z_blocks[b].array()).sum();
            RealVector cert = adj_z;
            if (p > 0) cert += cp.e.transpose() * y;
            if (znorm > 1.0 && bz < -1e-6 * znorm && cert.norm() <= 1e-9 * znorm * (1 + b_scale)) {
                sol.status = Status::Infeasible;
                sol.message = "primal infeasibility certificate found";
                break;
            }
        }
        // Unboundedness (dual infeasibility) heuristic.
        if (sol.x.norm() > 1e9) {
            RealVector xh = sol.x / sol.x.norm();
            bool recession = cp.c.dot(xh) < -1e-8 && (p == 0 || (cp.e * xh).norm() < 1e-8);
            for (int b = 0; recession && b < nblocks; ++b) {
                RealMatrix dir = kernels::apply_map(cp.blocks[b], xh);
                Eigen::SelfAdjointEigenSolver<RealMatrix> es(dir, Eigen::EigenvaluesOnly);
                recession = es.eigenvalues().minCoeff() > -1e-8;
            }
            if (recession) {
                sol.status = Status::Infeasible;
                sol.message = "objective unbounded below (dual infeasible)";
                break;
            }
        }

        if (iter == opts.max_iter) {
            sol.status = Status::MaxIterations;
            sol.message = "iteration limit reached";
            break;
        }

        // Nesterov-Todd scaling per block.
        IterWork w;
        w.llt_s.resize(nblocks);
        w.llt_z.resize(nblocks);
        w.scaling.resize(nblocks);
        bool scaling_ok = true;
        for (int b = 0; b < nblocks && scaling_ok; ++b) {
            // A roundoff-level negative eigenvalue gets nudged back inside.
            for (RealMatrix* mat : {&s_blocks[b], &z_blocks[b]}) {
                auto& llt = mat == &s_blocks[b] ? w.llt_s[b] : w.llt_z[b];
                llt.compute(*mat);
                if (llt.info() != Eigen::Success) {
                    Eigen::SelfAdjointEigenSolver<RealMatrix> es(*mat, Eigen::EigenvaluesOnly);
                    const double bump = std::abs(es.eigenvalues().minCoeff()) +
                                        1e-14 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
                    *mat += bump * RealMatrix::Identity(mat->rows(), mat->cols());
                    llt.compute(*mat);
                }
            }
            if (w.llt_s[b].info() != Eigen::Success || w.llt_z[b].info() != Eigen::Success) {
                scaling_ok = false;
                fail_message = "cone iterate lost positive definiteness";
                break;
            }
            RealMatrix ls = w.llt_s[b].matrixL();
            RealMatrix lz = w.llt_z[b].matrixL();
            Eigen::BDCSVD<RealMatrix> svd(RealMatrix(lz.transpose() * ls),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
            RealVector sv = svd.singularValues();
            if (sv.minCoeff() <= 0) {
                scaling_ok = false;
                fail_message = "Nesterov-Todd scaling broke down";
                break;
            }
            RealVector isqrt = sv.cwiseSqrt().cwiseInverse();
            NtScaling& nt = w.scaling[b];
            nt.r = ls * svd.matrixV() * isqrt.asDiagonal();
            nt.rti = lz * svd.matrixU() * isqrt.asDiagonal();
            nt.winv = nt.rti * nt.rti.transpose();
            nt.lam = sv;
        }
        if (!scaling_ok) {
            sol.status = Status::NumericalFailure;
            sol.message = fail_message;
            break;
        }

        // Newton matrix H_ij = sum_b Tr[A_i Winv A_j Winv].
        RealMatrix h = RealMatrix::Zero(m, m);
        for (int b = 0; b < nblocks; ++b)
            kernels::schur_accumulate(cp.blocks[b], w.scaling[b].winv, h, opts.threads);
        KktSolver kkt;
        kkt.factor(h, cp.e);

        // One linearized-KKT solve for a generic right-hand side
        //   A*(dz) + E^T dy = bx,  E dx = beq,  A dx - ds = bz,
        //   Lambda o (r^T dz r + rti^T ds rti) = bs.
        auto solve_newton = [&](const RealVector& bx, const RealVector& beq,
                                const std::vector<RealMatrix>& bz,
                                const std::vector<RealMatrix>& bs, RealVector& dx, RealVector& dy,
                                std::vector<RealMatrix>& ds, std::vector<RealMatrix>& dz) {
            std::vector<RealMatrix> qq(nblocks);
            RealVector q = RealVector::Zero(m);
            for (int b = 0; b < nblocks; ++b) {
                const NtScaling& nt = w.scaling[b];
                RealMatrix t = jordan_inverse(nt.lam, bs[b]);
                qq[b] = nt.rti * t * nt.rti.transpose() + nt.winv * bz[b] * nt.winv;
                qq[b] = 0.5 * (qq[b] + qq[b].transpose());
                kernels::weighted_rhs_accumulate(cp.blocks[b], qq[b], q, opts.threads);
            }
            RealVector sol_kkt = kkt.solve(q - bx, beq);
            dx = sol_kkt.head(m);
            dy = p > 0 ? RealVector(-sol_kkt.tail(p)) : RealVector();
            ds.resize(nblocks);
            dz.resize(nblocks);
            for (int b = 0; b < nblocks; ++b) {
                const NtScaling& nt = w.scaling[b];
                RealMatrix adx = kernels::apply_map(cp.blocks[b], dx);
                ds[b] = adx - bz[b];
                // Recover dz in the scaled frame, where the quantities stay
                // balanced: dz-bar = Lambda-inv(bs) - ds-bar.
                RealMatrix ds_bar = nt.rti.transpose() * ds[b] * nt.rti;
                RealMatrix dz_bar = jordan_inverse(nt.lam, bs[b]) - ds_bar;
                dz[b] = nt.rti * dz_bar * nt.rti.transpose();
                dz[b] = 0.5 * (dz[b] + dz[b].transpose());
            }
        };

        // Direction for a scaled complementarity target, with refinement passes
        // on the full Newton system (the cone elimination loses digits when the
        // scaling is ill-conditioned near the optimum).
        auto compute_direction = [&](const std::vector<RealMatrix>& ds_target, RealVector& dx,
                                     RealVector& dy, std::vector<RealMatrix>& ds,
                                     std::vector<RealMatrix>& dz) {
            std::vector<RealMatrix> bz(nblocks);
            for (int b = 0; b < nblocks; ++b) bz[b] = -rp[b];
            solve_newton(rd, rp_eq, bz, ds_target, dx, dy, ds, dz);

            double rhs_scale = rd.norm();
            for (int b = 0; b < nblocks; ++b) rhs_scale = std::hypot(rhs_scale, ds_target[b].norm());
            rhs_scale = std::max(1e-30, rhs_scale);

            for (int pass = 0; pass < 3; ++pass) {
                // residuals of the four Newton equations at the current direction
                RealVector rbx = rd;
                for (int b = 0; b < nblocks; ++b)
                    kernels::adjoint_accumulate(cp.blocks[b], -dz[b], rbx);  // rbx -= A*(dz)
                if (p > 0) rbx -= cp.e.transpose() * dy;
                RealVector rbeq = p > 0 ? RealVector(rp_eq - cp.e * dx) : RealVector();
                std::vector<RealMatrix> rbz(nblocks), rbs(nblocks);
                double res_norm = rbx.norm() + (p > 0 ? rbeq.norm() : 0.0);
                for (int b = 0; b < nblocks; ++b) {
                    const NtScaling& nt = w.scaling[b];
                    rbz[b] = -rp[b] - (kernels::apply_map(cp.blocks[b], dx) - ds[b]);
                    RealMatrix dzb = nt.r.transpose() * dz[b] * nt.r;
                    RealMatrix dsb = nt.rti.transpose() * ds[b] * nt.rti;
                    RealMatrix sum = dzb + dsb;
                    RealMatrix jprod(sum.rows(), sum.cols());
                    for (Eigen::Index i = 0; i < sum.rows(); ++i)
                        for (Eigen::Index j = 0; j < sum.cols(); ++j)
                            jprod(i, j) = 0.5 * (nt.lam[i] + nt.lam[j]) * sum(i, j);
                    rbs[b] = ds_target[b] - jprod;
                    res_norm += rbz[b].norm() + rbs[b].norm();
                }
                if (res_norm <= 1e-13 * rhs_scale) break;
                RealVector cx, cy;
                std::vector<RealMatrix> cs, cz;
                solve_newton(rbx, rbeq, rbz, rbs, cx, cy, cs, cz);
                dx += cx;
                if (p > 0) dy += cy;
                for (int b = 0; b < nblocks; ++b) {
                    ds[b] += cs[b];
                    dz[b] += cz[b];
                }
            }
        };

        auto step_bound = [&](const std::vector<RealMatrix>& ds,
                              const std::vector<RealMatrix>& dz) {
            std::pair<double, double> a{std::numeric_limits<double>::infinity(),
                                        std::numeric_limits<double>::infinity()};
            for (int b = 0; b < nblocks; ++b) {
                a.first = std::min(a.first, max_step(w.llt_s[b], ds[b]));
                a.second = std::min(a.second, max_step(w.llt_z[b], dz[b]));
            }
            return a;
        };

        // Predictor.
        std::vector<RealMatrix> ds_target(nblocks);
        for (int b = 0; b < nblocks; ++b) {
            RealVector lam2 = -w.scaling[b].lam.array().square();
            ds_target[b] = RealMatrix(lam2.asDiagonal());
        }
        RealVector dx_a, dy_a;
        std::vector<RealMatrix> ds_a, dz_a;
        compute_direction(ds_target, dx_a, dy_a, ds_a, dz_a);
        auto [ap_aff, ad_aff] = step_bound(ds_a, dz_a);
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);

        double gap_aff = 0.0;
        for (int b = 0; b < nblocks; ++b)
            gap_aff += ((s_blocks[b] + ap_aff * ds_a[b]).array() *
                        (z_blocks[b] + ad_aff * dz_a[b]).array())
                           .sum();
        double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
        sigma = std::min(1.0, sigma);

        // Corrector.
        for (int b = 0; b < nblocks; ++b) {
            const NtScaling& nt = w.scaling[b];
            RealMatrix dsb = nt.rti.transpose() * ds_a[b] * nt.rti;
            RealMatrix dzb = nt.r.transpose() * dz_a[b] * nt.r;
            RealMatrix cross = 0.5 * (dsb * dzb + dzb * dsb);
            RealVector target_diag = (sigma * mu - w.scaling[b].lam.array().square()).matrix();
            ds_target[b] = RealMatrix(target_diag.asDiagonal()) - cross;
        }
        RealVector dx, dy;
        std::vector<RealMatrix> ds, dz;
        compute_direction(ds_target, dx, dy, ds, dz);

        auto [ap, ad] = step_bound(ds, dz);
        if (std::min(ap, ad) < 1e-8) {
            // corrector overshoots near the boundary: retry with pure centering
            for (int b = 0; b < nblocks; ++b) {
                RealVector target_diag = (mu - w.scaling[b].lam.array().square()).matrix();
                ds_target[b] = RealMatrix(target_diag.asDiagonal());
            }
            compute_direction(ds_target, dx, dy, ds, dz);
            std::tie(ap, ad) = step_bound(ds, dz);
        }
        double alpha_p = std::min(1.0, 0.99 * ap);
        double alpha_d = std::min(1.0, 0.99 * ad);

        // Unequal steps may not decrease the complementarity; fall back to the
        // common step when they do not.
        auto gap_at = [&](double a_p, double a_d) {
            double gnew = 0.0;
            for (int b = 0; b < nblocks; ++b)
                gnew += ((s_blocks[b] + a_p * ds[b]).array() *
                         (z_blocks[b] + a_d * dz[b]).array())
                            .sum();
            return gnew;
        };
        if (gap_at(alpha_p, alpha_d) > gap) {
            const double common = std::min(alpha_p, alpha_d);
            if (gap_at(common, common) < gap_at(alpha_p, alpha_d)) alpha_p = alpha_d = common;
        }
        if (std::min(alpha_p, alpha_d) < 1e-10) {
            if (++stall_count >= 2) {
                sol.status = Status::NumericalFailure;
                sol.message = "step length collapsed";
                break;
            }
        } else {
            stall_count = 0;
        }

        if (opts.verbose)
            std::fprintf(stderr, "      sigma %.2e  |dx| %.2e  alpha_p %.3e  alpha_d %.3e\n",
                         sigma, dx.norm(), alpha_p, alpha_d);

        sol.x += alpha_p * dx;
        if (p > 0) y += alpha_d * dy;
        for (int b = 0; b < nblocks; ++b) {
            s_blocks[b] += alpha_p * ds[b];
            z_blocks[b] += alpha_d * dz[b];
            s_blocks[b] = 0.5 * (s_blocks[b] + s_blocks[b].transpose());
            z_blocks[b] = 0.5 * (z_blocks[b] + z_blocks[b].transpose());
        }
    }

    // Feasibility of the returned point, for the solution contract.
    double min_eig = std::numeric_limits<double>::infinity();
    std::vector<RealMatrix> sx = apply_all(sol.x);
    for (int b = 0; b < nblocks; ++b) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(sx[b], Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    sol.min_block_eig = min_eig;
    if (sol.status == Status::Optimal && min_eig < -opts.feas_tol) {
        sol.status = Status::NumericalFailure;
        sol.message = "returned point violates a PSD constraint";
    }
    return sol;
}

}  // namespace qincompat::sdp
