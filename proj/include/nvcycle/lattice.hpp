#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "nvcycle/franck_condon.hpp"

// Toy harmonic lattices: assemble the mass-weighted dynamical matrix from
// central pair springs, diagonalize for normal modes, project a ground-to-
// excited displacement field onto the modes, and convert the per-mode
// displacements into partial Huang-Rhys factors. Force constants are
// illustrative spring models, not ab initio data.

namespace nvcycle {

enum class Boundary { free_ends, periodic };

struct Spring {
  int i = 0;
  int j = 0;
  double k_meV_per_A2 = 0.0;
};

struct ToyLattice {
  int dimension = 1;
  std::vector<double> masses_amu;     // one per site
  std::vector<double> positions_A;    // n_sites * dimension, site-major
  std::vector<Spring> springs;
  Boundary boundary = Boundary::free_ends;
  std::vector<double> box_lengths_A;  // per axis, required when periodic

  int n_sites() const { return static_cast<int>(masses_amu.size()); }
  void validate() const;
  // Equilibrium bond vector from site i to site j, minimum-image when
  // periodic.
  std::vector<double> bond_vector(int i, int j) const;
};

struct DisplacementField {
  std::vector<double> delta_R_A;  // n_sites * dimension, site-major

  void validate(const ToyLattice& lat) const;
};

struct NormalModes {
  std::vector<double> energies_meV;  // ascending; zero modes clamped to 0
  Eigen::MatrixXd eigenvectors;      // column k is the mass-weighted mode
  std::vector<bool> is_zero_mode;

  int n_zero_modes() const;
};

// Per-mode coupling of a displacement field, zero modes excluded.
struct ModeCoupling {
  int mode_index = 0;
  double energy_meV = 0.0;
  double deltaQ = 0.0;  // sqrt(amu) * Angstrom
  double huang_rhys = 0.0;

  PhononMode phonon_mode() const;
};

Eigen::MatrixXd build_dynamical_matrix(const ToyLattice& lat);

NormalModes solve_modes(const Eigen::MatrixXd& dynamical_matrix);
NormalModes solve_modes(const ToyLattice& lat);

// Mass-weighted projection deltaQ_k = sum_m sqrt(M_m) dR_m . eta^k_m for
// every mode, zero modes included.
std::vector<double> project_displacement(const NormalModes& modes,
                                         const ToyLattice& lat,
                                         const DisplacementField& field);

std::vector<ModeCoupling> huang_rhys_spectrum(const NormalModes& modes,
                                              const std::vector<double>& deltaQ);

// Builders. The square lattice includes diagonal springs because central
// nearest-neighbour springs alone leave shear floppy.
ToyLattice make_chain(int n_sites, double mass_amu, double k_meV_per_A2,
                      double spacing_A, Boundary boundary);
ToyLattice make_square(int nx, int ny, double mass_amu, double k_nn_meV_per_A2,
                       double k_diag_meV_per_A2, double spacing_A,
                       Boundary boundary);

// Displacement presets. With an empty direction the push points radially
// away from the centre site; otherwise along the given axis vector.
DisplacementField gaussian_push(const ToyLattice& lat, int center_site,
                                double amplitude_A, double sigma_A,
                                const std::vector<double>& direction = {});
DisplacementField uniform_translation(const ToyLattice& lat,
                                      const std::vector<double>& direction);

}  // namespace nvcycle
