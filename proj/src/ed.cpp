#include "rabi/ed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rabi {
namespace {

// (P v): parity operator sigma_x * (-1)^n in the |up,n>,|down,n> ordering.
Eigen::VectorXd apply_parity(const Eigen::VectorXd& v, int N) {
    const int d = N + 1;
    Eigen::VectorXd out(2 * d);
    double sign = 1.0;
    for (int n = 0; n <= N; ++n) {
        out[n] = sign * v[d + n];
        out[d + n] = sign * v[n];
        sign = -sign;
    }
    return out;
}

double parity_expectation(const Eigen::VectorXd& v, int N) {
    const int d = N + 1;
    double p = 0.0, sign = 1.0;
    for (int n = 0; n <= N; ++n) {
        p += sign * 2.0 * v[n] * v[d + n];
        sign = -sign;
    }
    return p;
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(const ModelParams& p, int cutoff) {
    p.validate();
    if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    const int N = cutoff, d = N + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (int n = 0; n <= N; ++n) {
        H(n, n) = p.omega * n;
        H(d + n, d + n) = p.omega * n;
        H(n, d + n) = 0.5 * p.Omega;
        H(d + n, n) = 0.5 * p.Omega;
        if (n < N) {
            const double t = p.g * std::sqrt(n + 1.0);
            H(n, n + 1) = t;
            H(n + 1, n) = t;
            H(d + n, d + n + 1) = -t;
            H(d + n + 1, d + n) = -t;
        }
    }
    return H;
}

EDResult diagonalize(const ModelParams& p, int cutoff) {
    const Eigen::MatrixXd H = build_hamiltonian(p, cutoff);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed");

    EDResult r;
    r.cutoff = cutoff;
    r.params = p;
    r.eigenvalues = solver.eigenvalues();
    r.eigenvectors = solver.eigenvectors();

    const int N = cutoff;
    const int dim = 2 * (N + 1);
    const double scale = std::max(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[dim - 1]));
    const double degen_tol = 1e-9 * std::max(1.0, scale);

    // Parity commutes with the truncated Hamiltonian exactly, so impure
    // expectations only occur inside (quasi-)degenerate clusters; rotate such
    // vectors onto their dominant-parity projection and verify the residual.
    r.parity_labels.resize(dim);
    for (int k = 0; k < dim; ++k) {
        Eigen::VectorXd v = r.eigenvectors.col(k);
        double pe = parity_expectation(v, N);
        if (std::abs(pe) <= 0.99) {
            const double s = pe >= 0.0 ? 1.0 : -1.0;
            Eigen::VectorXd proj = v + s * apply_parity(v, N);
            const double nrm = proj.norm();
            if (nrm < 1e-6) throw CutoffTooSmallError("parity projection annihilated state");
            proj /= nrm;
            const double resid = (H * proj - r.eigenvalues[k] * proj).cwiseAbs().maxCoeff();
            if (resid > std::max(1e-7, 1e3 * degen_tol))
                throw CutoffTooSmallError("parity-impure state outside a degenerate cluster");
            // keep the pair orthogonal: re-orthogonalize against the partner
            if (k > 0 && std::abs(r.eigenvalues[k] - r.eigenvalues[k - 1]) < degen_tol) {
                const Eigen::VectorXd prev = r.eigenvectors.col(k - 1);
                proj -= prev.dot(proj) * prev;
                const double n2 = proj.norm();
                if (n2 < 1e-6) throw CutoffTooSmallError("degenerate pair projection collapsed");
                proj /= n2;
            }
            r.eigenvectors.col(k) = proj;
            v = proj;
            pe = parity_expectation(v, N);
            if (std::abs(pe) <= 0.99)
                throw CutoffTooSmallError("parity purity not restorable at this cutoff");
        }
        r.parity_labels[k] = pe >= 0.0 ? 1 : -1;
    }
    return r;
}

int converged_cutoff(const ModelParams& p, double tol) {
    p.validate();
    auto low_two = [&p](int N) {
        const Eigen::MatrixXd H = build_hamiltonian(p, N);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(H, Eigen::EigenvaluesOnly);
        return std::pair<double, double>(s.eigenvalues()[0], s.eigenvalues()[1]);
    };
    int N = 24;
    auto cur = low_two(N);
    while (N <= 1536) {
        const auto nxt = low_two(2 * N);
        if (std::abs(cur.first - nxt.first) < tol && std::abs(cur.second - nxt.second) < tol)
            return N;
        N *= 2;
        cur = nxt;
    }
    throw CutoffTooSmallError("cutoff did not converge by N = 1536 (tol " + std::to_string(tol) + ")");
}

int state_index(const EDResult& r, Parity parity, int k) {
    const int want = parity_sign(parity);
    int seen = 0;
    for (std::size_t i = 0; i < r.parity_labels.size(); ++i) {
        if (r.parity_labels[i] == want) {
            if (seen == k) return static_cast<int>(i);
            ++seen;
        }
    }
    throw std::invalid_argument("no state with requested parity/rank");
}

EdWavefunction wavefunction(const EDResult& r, int state, const QuadratureGrid& grid) {
    const int N = r.cutoff, d = N + 1;
    const Eigen::VectorXd v = r.eigenvectors.col(state);
    EdWavefunction wf;
    wf.psi_plus.resize(grid.size());
    wf.psi_minus.resize(grid.size());
    std::vector<double> h(d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        hermite_all(N, grid.nodes[i], h.data());
        double up = 0.0, dn = 0.0;
        for (int n = 0; n <= N; ++n) {
            up += v[n] * h[n];
            dn += v[d + n] * h[n];
        }
        wf.psi_plus[i] = up;
        wf.psi_minus[i] = dn;
    }
    std::size_t peak = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = std::abs(wf.psi_plus[i]);
        if (a > best) {
            best = a;
            peak = i;
        }
    }
    if (wf.psi_plus[peak] < 0.0)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            wf.psi_plus[i] = -wf.psi_plus[i];
            wf.psi_minus[i] = -wf.psi_minus[i];
        }
    return wf;
}

EdObservables observables_ed(const EDResult& r, int state) {
    const int N = r.cutoff, d = N + 1;
    const Eigen::VectorXd v = r.eigenvectors.col(state);
    EdObservables o;
    o.energy = r.eigenvalues[state];
    for (int n = 0; n <= N; ++n) {
        o.photon += n * (v[n] * v[n] + v[d + n] * v[d + n]);
        o.sigma_x += 2.0 * v[n] * v[d + n];
        if (n < N) {
            const double lad = std::sqrt(n + 1.0);
            o.coupling_corr += 2.0 * lad * (v[n] * v[n + 1] - v[d + n] * v[d + n + 1]);
        }
    }
    return o;
}

namespace {

Eigen::VectorXd aligned_vector(const ModelParams& base, double g, int state, int cutoff,
                               const Eigen::VectorXd& ref) {
    ModelParams p = base;
    p.g = g;
    const EDResult r = diagonalize(p, cutoff);
    Eigen::VectorXd v = r.eigenvectors.col(state);
    const double ov = ref.dot(v);
    if (std::abs(ov) < 0.9)
        throw StepTooLargeError("neighbor overlap below 0.9; reduce dg");
    if (ov < 0.0) v = -v;
    return v;
}

double qfi_once(const ModelParams& p, int state, double dg, int cutoff,
                const Eigen::VectorXd& v0) {
    const Eigen::VectorXd vp = aligned_vector(p, p.g + dg, state, cutoff, v0);
    const Eigen::VectorXd vm = aligned_vector(p, p.g - dg, state, cutoff, v0);
    const Eigen::VectorXd dv = (vp - vm) / (2.0 * dg);
    const double d2 = dv.dot(dv);
    const double proj = dv.dot(v0);
    return 4.0 * (d2 - proj * proj);
}

}  // namespace

double qfi_ed(const ModelParams& p, int state, double dg, int cutoff) {
    p.validate();
    if (!(dg > 0.0)) throw std::invalid_argument("dg must be > 0");
    if (cutoff <= 0) cutoff = converged_cutoff(p);
    const EDResult r0 = diagonalize(p, cutoff);
    const Eigen::VectorXd v0 = r0.eigenvectors.col(state);
    const double f_h = qfi_once(p, state, dg, cutoff, v0);
    const double f_h2 = qfi_once(p, state, 0.5 * dg, cutoff, v0);
    return (4.0 * f_h2 - f_h) / 3.0;
}

}  // namespace rabi
