#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvge {

class GreenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Green's-function property required by the existence theory failed
/// (for example a Harnack constant that is not positive).
class HypothesisError : public GreenError {
public:
    using GreenError::GreenError;
};

enum class BoundaryKind { Dirichlet, RightFocal, Tabulated };

/// Which extremum of s -> (1/script_g(s)) * integral_t G(t, s) defines C0.
/// `PaperSup` takes the supremum as written in the hypothesis; `CoerciveInf`
/// takes the infimum, the value for which the coercivity bound
/// integral u >= C0 ||u|| holds on the range of the operator.
enum class C0Mode { PaperSup, CoerciveInf };

std::string to_string(BoundaryKind kind);
std::string to_string(C0Mode mode);
C0Mode parse_c0_mode(const std::string& text);

/// G sampled on a uniform (n_t x n_s) grid covering [0,1]^2, row-major in t.
struct GreenTable {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * s.size() + j]; }
};

/// Reads the CSV layout
///
///     t\s,s_0,s_1,...,s_m
///     t_0,G(t_0,s_0),...,G(t_0,s_m)
///     ...
///
/// Both axes must be uniform on [0, 1] with at least 33 points.
GreenTable read_green_csv(std::istream& in);
GreenTable read_green_csv_file(const std::string& path);
void write_green_csv(std::ostream& out, const GreenTable& table);

/// Green's function of the boundary data with its derived constants
/// (script_g(s) = max_t G(t,s), eta0, C0, G^M, partial G^M), all computed
/// once at construction.
class BoundaryModel {
public:
    static BoundaryModel dirichlet(double alpha, double beta, C0Mode mode = C0Mode::CoerciveInf);
    static BoundaryModel right_focal(double alpha, double beta, C0Mode mode = C0Mode::CoerciveInf);
    static BoundaryModel tabulated(GreenTable table, double alpha, double beta,
                                   C0Mode mode = C0Mode::CoerciveInf);

    BoundaryKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    C0Mode c0_mode() const noexcept { return mode_; }

    /// G(t, s); throws GreenError outside [0,1]^2.
    double operator()(double t, double s) const;
    /// max over t in [0,1] of G(t, s).
    double script_g(double s) const;
    /// integral over t in [0,1] of G(t, s).
    double column_integral(double s) const;
    /// integral over s in [lo, hi] of G(t, s).
    double row_integral(double t, double lo, double hi) const;
    /// Points where t -> G(t, s) is not smooth (for fixed s).
    std::vector<double> t_kinks(double s) const;
    /// Points where s -> G(t, s) is not smooth (for fixed t).
    std::vector<double> s_kinks(double t) const;

    double eta0() const noexcept { return eta0_; }
    double c0() const noexcept { return mode_ == C0Mode::CoerciveInf ? c0_inf_ : c0_sup_; }
    double c0(C0Mode mode) const noexcept { return mode == C0Mode::CoerciveInf ? c0_inf_ : c0_sup_; }
    /// max over tau of integral_0^1 G(tau, s) ds.
    double gm() const noexcept { return gm_; }
    /// max over tau of integral_alpha^beta G(tau, s) ds.
    double partial_gm() const noexcept { return partial_gm_; }

    /// Same model with a different C0 mode.
    BoundaryModel with_c0_mode(C0Mode mode) const;

    std::string describe() const;

private:
    BoundaryModel(BoundaryKind kind, double alpha, double beta, C0Mode mode,
                  std::shared_ptr<const GreenTable> table);
    void compute_constants();

    BoundaryKind kind_;
    double alpha_;
    double beta_;
    C0Mode mode_;
    std::shared_ptr<const GreenTable> table_;
    double eta0_ = 0.0;
    double c0_inf_ = 0.0;
    double c0_sup_ = 0.0;
    double gm_ = 0.0;
    double partial_gm_ = 0.0;
};

/// Dense-grid estimates of the constants, valid for any model. Used for
/// tabulated Green's functions and to cross-check the closed forms.
namespace green_numeric {

struct Settings {
    int samples = 4096;
    double endpoint_margin = 1e-6;
    int refine_rounds = 3;
};

double eta0(const BoundaryModel& model, const Settings& settings = {});
double c0(const BoundaryModel& model, C0Mode mode, const Settings& settings = {});
double gm(const BoundaryModel& model, const Settings& settings = {});
double partial_gm(const BoundaryModel& model, const Settings& settings = {});

}  // namespace green_numeric

}  // namespace kvge
