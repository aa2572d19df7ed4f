#include "nvcycle/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Dense>

#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

namespace {
constexpr double kZeroModeTol = 1e-8;  // relative to the spectral scale
}

void ToyLattice::validate() const {
  if (dimension < 1 || dimension > 3)
    throw ValidationError("lattice dimension must be 1, 2, or 3");
  if (masses_amu.empty()) throw ValidationError("lattice has no sites");
  for (double m : masses_amu)
    if (!(m > 0.0) || !std::isfinite(m))
      throw ValidationError("site masses must be positive");
  if (positions_A.size() != masses_amu.size() * static_cast<std::size_t>(dimension))
    throw ValidationError("position array does not match n_sites * dimension");
  if (boundary == Boundary::periodic) {
    if (box_lengths_A.size() != static_cast<std::size_t>(dimension))
      throw ValidationError("periodic lattice needs one box length per axis");
    for (double L : box_lengths_A)
      if (!(L > 0.0)) throw ValidationError("box lengths must be positive");
  }

  const int n = n_sites();
  std::vector<std::vector<int>> adj(n);
  for (const Spring& s : springs) {
    if (s.i < 0 || s.i >= n || s.j < 0 || s.j >= n)
      throw ValidationError("spring references a site out of range");
    if (s.i == s.j) throw ValidationError("spring connects a site to itself");
    if (!(s.k_meV_per_A2 >= 0.0) || !std::isfinite(s.k_meV_per_A2))
      throw ValidationError("spring constants must be non-negative");
    if (s.k_meV_per_A2 > 0.0) {
      double len_sq = 0.0;
      const auto d = bond_vector(s.i, s.j);
      for (double c : d) len_sq += c * c;
      if (!(len_sq > 0.0))
        throw ValidationError("bonded sites coincide; bond direction undefined");
      adj[s.i].push_back(s.j);
      adj[s.j].push_back(s.i);
    }
  }

  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
  }
  if (reached != n) throw ValidationError("lattice spring graph is disconnected");
}

std::vector<double> ToyLattice::bond_vector(int i, int j) const {
  std::vector<double> d(dimension);
  for (int a = 0; a < dimension; ++a) {
    double c = positions_A[static_cast<std::size_t>(j) * dimension + a] -
               positions_A[static_cast<std::size_t>(i) * dimension + a];
    if (boundary == Boundary::periodic) {
      const double L = box_lengths_A[a];
      c -= L * std::round(c / L);
    }
    d[a] = c;
  }
  return d;
}

void DisplacementField::validate(const ToyLattice& lat) const {
  if (delta_R_A.size() !=
      lat.masses_amu.size() * static_cast<std::size_t>(lat.dimension))
    throw ValidationError("displacement field does not match the lattice");
  for (double c : delta_R_A)
    if (!std::isfinite(c))
      throw ValidationError("displacement field has non-finite entries");
}

int NormalModes::n_zero_modes() const {
  return static_cast<int>(std::count(is_zero_mode.begin(), is_zero_mode.end(), true));
}

PhononMode ModeCoupling::phonon_mode() const {
  return PhononMode(energy_meV, huang_rhys, "mode-" + std::to_string(mode_index));
}

Eigen::MatrixXd build_dynamical_matrix(const ToyLattice& lat) {
  lat.validate();
  const int dim = lat.dimension;
  const int n = lat.n_sites() * dim;
  Eigen::MatrixXd force = Eigen::MatrixXd::Zero(n, n);

  for (const Spring& s : lat.springs) {
    if (!(s.k_meV_per_A2 > 0.0)) continue;
    const auto d = lat.bond_vector(s.i, s.j);
    double len = 0.0;
    for (double c : d) len += c * c;
    len = std::sqrt(len);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        // Central spring linearized about equilibrium: k n n^T on the bond
        // axis.
        const double block = s.k_meV_per_A2 * (d[a] / len) * (d[b] / len);
        const int ia = s.i * dim + a, ib = s.i * dim + b;
        const int ja = s.j * dim + a, jb = s.j * dim + b;
        force(ia, ib) += block;
        force(ja, jb) += block;
        force(ia, jb) -= block;
        force(ja, ib) -= block;
      }
  }

  Eigen::VectorXd inv_sqrt_m(n);
  for (int s = 0; s < lat.n_sites(); ++s)
    for (int a = 0; a < dim; ++a)
      inv_sqrt_m(s * dim + a) = 1.0 / std::sqrt(lat.masses_amu[s]);
  return inv_sqrt_m.asDiagonal() * force * inv_sqrt_m.asDiagonal();
}

NormalModes solve_modes(const Eigen::MatrixXd& dynamical_matrix) {
  if (dynamical_matrix.rows() != dynamical_matrix.cols())
    throw ValidationError("dynamical matrix must be square");
  if (!dynamical_matrix.isApprox(dynamical_matrix.transpose(), 1e-10))
    throw ValidationError("dynamical matrix must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dynamical_matrix);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen-decomposition of the dynamical matrix failed");

  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const int n = static_cast<int>(lambda.size());
  double scale = 0.0;
  for (int k = 0; k < n; ++k) scale = std::max(scale, std::fabs(lambda(k)));
  const double tol = kZeroModeTol * std::max(scale, 1.0);

  NormalModes modes;
  modes.eigenvectors = solver.eigenvectors();
  modes.energies_meV.resize(n);
  modes.is_zero_mode.resize(n);
  for (int k = 0; k < n; ++k) {
    if (lambda(k) < -tol)
      throw NumericError("unstable lattice: negative dynamical eigenvalue " +
                         std::to_string(lambda(k)));
    const bool zero = lambda(k) <= tol;
    modes.is_zero_mode[k] = zero;
    modes.energies_meV[k] =
        zero ? 0.0
             : std::sqrt(constants::hbar_sq_meV_amu_A2 * lambda(k));
  }
  return modes;
}

NormalModes solve_modes(const ToyLattice& lat) {
  return solve_modes(build_dynamical_matrix(lat));
}

std::vector<double> project_displacement(const NormalModes& modes,
                                         const ToyLattice& lat,
                                         const DisplacementField& field) {
  lat.validate();
  field.validate(lat);
  const int dim = lat.dimension;
  const int n = lat.n_sites() * dim;
  if (modes.eigenvectors.rows() != n)
    throw ValidationError("modes do not match the lattice size");

  Eigen::VectorXd weighted(n);
  for (int s = 0; s < lat.n_sites(); ++s) {
    const double sqrt_m = std::sqrt(lat.masses_amu[s]);
    for (int a = 0; a < dim; ++a)
      weighted(s * dim + a) = sqrt_m * field.delta_R_A[s * dim + a];
  }
  const Eigen::VectorXd q = modes.eigenvectors.transpose() * weighted;
  return std::vector<double>(q.data(), q.data() + q.size());
}

std::vector<ModeCoupling> huang_rhys_spectrum(const NormalModes& modes,
                                              const std::vector<double>& deltaQ) {
  if (deltaQ.size() != modes.energies_meV.size())
    throw ValidationError("deltaQ list does not match the mode count");
  std::vector<ModeCoupling> out;
  for (std::size_t k = 0; k < deltaQ.size(); ++k) {
    if (modes.is_zero_mode[k]) continue;
    ModeCoupling c;
    c.mode_index = static_cast<int>(k);
    c.energy_meV = modes.energies_meV[k];
    c.deltaQ = deltaQ[k];
    c.huang_rhys = huang_rhys_from_displacement(c.energy_meV, c.deltaQ);
    out.push_back(c);
  }
  return out;
}

ToyLattice make_chain(int n_sites, double mass_amu, double k_meV_per_A2,
                      double spacing_A, Boundary boundary) {
  if (n_sites < 2) throw ValidationError("chain needs at least 2 sites");
  if (!(spacing_A > 0.0)) throw ValidationError("spacing must be positive");
  ToyLattice lat;
  lat.dimension = 1;
  lat.boundary = boundary;
  lat.masses_amu.assign(n_sites, mass_amu);
  for (int i = 0; i < n_sites; ++i) lat.positions_A.push_back(i * spacing_A);
  for (int i = 0; i + 1 < n_sites; ++i)
    lat.springs.push_back({i, i + 1, k_meV_per_A2});
  if (boundary == Boundary::periodic) {
    lat.box_lengths_A = {n_sites * spacing_A};
    lat.springs.push_back({n_sites - 1, 0, k_meV_per_A2});
  }
  lat.validate();
  return lat;
}

ToyLattice make_square(int nx, int ny, double mass_amu, double k_nn_meV_per_A2,
                       double k_diag_meV_per_A2, double spacing_A,
                       Boundary boundary) {
  if (nx < 2 || ny < 2) throw ValidationError("square lattice needs nx, ny >= 2");
  if (!(spacing_A > 0.0)) throw ValidationError("spacing must be positive");
  ToyLattice lat;
  lat.dimension = 2;
  lat.boundary = boundary;
  const auto site = [nx](int ix, int iy) { return iy * nx + ix; };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      lat.masses_amu.push_back(mass_amu);
      lat.positions_A.push_back(ix * spacing_A);
      lat.positions_A.push_back(iy * spacing_A);
    }
  const bool wrap = boundary == Boundary::periodic;
  if (wrap) lat.box_lengths_A = {nx * spacing_A, ny * spacing_A};
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx || wrap)
        lat.springs.push_back({site(ix, iy), site((ix + 1) % nx, iy),
                               k_nn_meV_per_A2});
      if (iy + 1 < ny || wrap)
        lat.springs.push_back({site(ix, iy), site(ix, (iy + 1) % ny),
                               k_nn_meV_per_A2});
      if (k_diag_meV_per_A2 > 0.0) {
        if ((ix + 1 < nx && iy + 1 < ny) || wrap)
          lat.springs.push_back({site(ix, iy),
                                 site((ix + 1) % nx, (iy + 1) % ny),
                                 k_diag_meV_per_A2});
        if ((ix + 1 < nx && iy > 0) || wrap)
          lat.springs.push_back({site(ix, iy),
                                 site((ix + 1) % nx, (iy - 1 + ny) % ny),
                                 k_diag_meV_per_A2});
      }
    }
  lat.validate();
  return lat;
}

DisplacementField gaussian_push(const ToyLattice& lat, int center_site,
                                double amplitude_A, double sigma_A,
                                const std::vector<double>& direction) {
  lat.validate();
  if (center_site < 0 || center_site >= lat.n_sites())
    throw ValidationError("centre site out of range");
  if (!(sigma_A > 0.0)) throw ValidationError("sigma must be positive");
  const int dim = lat.dimension;
  std::vector<double> axis;
  if (!direction.empty()) {
    if (direction.size() != static_cast<std::size_t>(dim))
      throw ValidationError("direction does not match the lattice dimension");
    double norm = 0.0;
    for (double c : direction) norm += c * c;
    if (!(norm > 0.0)) throw ValidationError("direction must be nonzero");
    norm = std::sqrt(norm);
    for (double c : direction) axis.push_back(c / norm);
  }

  DisplacementField field;
  field.delta_R_A.assign(lat.masses_amu.size() * dim, 0.0);
  for (int s = 0; s < lat.n_sites(); ++s) {
    const auto d = lat.bond_vector(center_site, s);
    double r_sq = 0.0;
    for (double c : d) r_sq += c * c;
    const double envelope = amplitude_A * std::exp(-r_sq / (2.0 * sigma_A * sigma_A));
    if (!axis.empty()) {
      for (int a = 0; a < dim; ++a) field.delta_R_A[s * dim + a] = envelope * axis[a];
    } else if (r_sq > 0.0) {
      const double r = std::sqrt(r_sq);
      for (int a = 0; a < dim; ++a)
        field.delta_R_A[s * dim + a] = envelope * d[a] / r;
    }
  }
  return field;
}

DisplacementField uniform_translation(const ToyLattice& lat,
                                      const std::vector<double>& direction) {
  lat.validate();
  if (direction.size() != static_cast<std::size_t>(lat.dimension))
    throw ValidationError("direction does not match the lattice dimension");
  DisplacementField field;
  field.delta_R_A.resize(lat.masses_amu.size() * lat.dimension);
  for (int s = 0; s < lat.n_sites(); ++s)
    for (int a = 0; a < lat.dimension; ++a)
      field.delta_R_A[s * lat.dimension + a] = direction[a];
  return field;
}

}  // namespace nvcycle
