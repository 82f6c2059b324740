#include "kvge/green.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "kvge/quadrature.hpp"

namespace kvge {

namespace {

constexpr std::size_t kMinTableSize = 33;
constexpr double kUniformTol = 1e-9;
constexpr double kUnitTol = 1e-9;

void check_unit(double t, double s) {
    if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0))
        throw GreenError("Green's function arguments must lie in [0,1], got (" + std::to_string(t) + ", " +
                         std::to_string(s) + ")");
}

/// Locate x in a uniform grid on [0,1] with n points: index of the cell and
/// the weight of its right end.
std::pair<std::size_t, double> locate(double x, std::size_t n) {
    const double pos = x * static_cast<double>(n - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
    return {i, pos - static_cast<double>(i)};
}

/// Extremum of a piecewise-smooth function on [a, b]: samples at the ends,
/// the kinks and a uniform grid, then golden-section search inside the
/// bracket around the best sample.
double extremize(const std::function<double(double)>& f, double a, double b, const std::vector<double>& kinks,
                 bool maximize) {
    std::vector<double> xs = quad::uniform_mesh(16, a, b);
    for (double k : kinks) {
        if (k > a && k < b) xs.push_back(k);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double sign = maximize ? 1.0 : -1.0;
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = sign * f(xs[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = xs[best > 0 ? best - 1 : 0];
    double hi = xs[std::min(best + 1, xs.size() - 1)];
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = sign * f(x1);
    double f2 = sign * f(x2);
    for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = sign * f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = sign * f(x1);
        }
    }
    best_val = std::max({best_val, f1, f2});
    return sign * best_val;
}

/// Integral of a function that is polynomial of low degree between kinks.
double piecewise_integral(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& kinks) {
    const std::vector<double> base{a, b};
    const auto mesh = quad::merge_breakpoints(base, kinks);
    return quad::composite(f, mesh);
}

}  // namespace

std::string to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::Dirichlet: return "dirichlet";
        case BoundaryKind::RightFocal: return "right_focal";
        case BoundaryKind::Tabulated: return "tabulated";
    }
    return "?";
}

std::string to_string(C0Mode mode) { return mode == C0Mode::PaperSup ? "paper_sup" : "coercive_inf"; }

C0Mode parse_c0_mode(const std::string& text) {
    if (text == "paper_sup") return C0Mode::PaperSup;
    if (text == "coercive_inf") return C0Mode::CoerciveInf;
    throw GreenError("unknown C0 mode '" + text + "' (expected paper_sup or coercive_inf)");
}

GreenTable read_green_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
        }
        return cells;
    };
    auto number = [](const std::string& cell, std::size_t row) {
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
            return v;
        } catch (const std::exception&) {
            throw GreenError("Green table: malformed number '" + cell + "' on line " + std::to_string(row + 1));
        }
    };

    std::string line;
    if (!std::getline(in, line)) throw GreenError("Green table: empty input");
    const auto header = split(line);
    if (header.empty() || header.front() != "t\\s")
        throw GreenError("Green table: header must start with 't\\s'");
    GreenTable table;
    for (std::size_t j = 1; j < header.size(); ++j) table.s.push_back(number(header[j], 0));
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw GreenError("Green table: line " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
        table.t.push_back(number(cells[0], row));
        for (std::size_t j = 1; j < cells.size(); ++j) {
            const double g = number(cells[j], row);
            if (g < 0.0) throw GreenError("Green table: negative value on line " + std::to_string(row + 1));
            table.values.push_back(g);
        }
    }
    auto check_axis = [](const std::vector<double>& axis, const char* name) {
        if (axis.size() < kMinTableSize)
            throw GreenError(std::string("Green table: ") + name + " axis needs at least 33 points, got " +
                             std::to_string(axis.size()));
        const double n = static_cast<double>(axis.size() - 1);
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (std::abs(axis[i] - static_cast<double>(i) / n) > kUniformTol)
                throw GreenError(std::string("Green table: ") + name + " axis must be uniform on [0,1]");
        }
    };
    check_axis(table.t, "t");
    check_axis(table.s, "s");
    return table;
}

GreenTable read_green_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GreenError("cannot open Green table '" + path + "'");
    return read_green_csv(in);
}

void write_green_csv(std::ostream& out, const GreenTable& table) {
    out << std::setprecision(17) << "t\\s";
    for (double s : table.s) out << ',' << s;
    out << '\n';
    for (std::size_t i = 0; i < table.t.size(); ++i) {
        out << table.t[i];
        for (std::size_t j = 0; j < table.s.size(); ++j) out << ',' << table.at(i, j);
        out << '\n';
    }
}

BoundaryModel::BoundaryModel(BoundaryKind kind, double alpha, double beta, C0Mode mode,
                             std::shared_ptr<const GreenTable> table)
    : kind_(kind), alpha_(alpha), beta_(beta), mode_(mode), table_(std::move(table)) {
    if (!(alpha >= 0.0 && alpha < beta && beta <= 1.0))
        throw GreenError("need 0 <= alpha < beta <= 1, got alpha=" + std::to_string(alpha) +
                         ", beta=" + std::to_string(beta));
    compute_constants();
}

BoundaryModel BoundaryModel::dirichlet(double alpha, double beta, C0Mode mode) {
    return BoundaryModel(BoundaryKind::Dirichlet, alpha, beta, mode, nullptr);
}

BoundaryModel BoundaryModel::right_focal(double alpha, double beta, C0Mode mode) {
    return BoundaryModel(BoundaryKind::RightFocal, alpha, beta, mode, nullptr);
}

BoundaryModel BoundaryModel::tabulated(GreenTable table, double alpha, double beta, C0Mode mode) {
    if (table.values.size() != table.t.size() * table.s.size())
        throw GreenError("Green table: value count does not match the grid");
    return BoundaryModel(BoundaryKind::Tabulated, alpha, beta, mode,
                         std::make_shared<const GreenTable>(std::move(table)));
}

BoundaryModel BoundaryModel::with_c0_mode(C0Mode mode) const {
    BoundaryModel copy = *this;
    copy.mode_ = mode;
    return copy;
}

void BoundaryModel::compute_constants() {
    switch (kind_) {
        case BoundaryKind::Dirichlet:
            eta0_ = std::min(alpha_, 1.0 - beta_);
            // integral_t G(t,s) = s(1-s)/2 = script_g(s)/2 for every s.
            c0_inf_ = 0.5;
            c0_sup_ = 0.5;
            gm_ = 0.125;
            partial_gm_ = green_numeric::partial_gm(*this);
            break;
        case BoundaryKind::RightFocal:
            eta0_ = alpha_;
            // ratio (s - s^2/2)/s = 1 - s/2 ranges over [1/2, 1).
            c0_inf_ = 0.5;
            c0_sup_ = 1.0;
            gm_ = 0.5;
            partial_gm_ = 0.5 * (beta_ * beta_ - alpha_ * alpha_);
            break;
        case BoundaryKind::Tabulated:
            eta0_ = green_numeric::eta0(*this);
            c0_inf_ = green_numeric::c0(*this, C0Mode::CoerciveInf);
            c0_sup_ = green_numeric::c0(*this, C0Mode::PaperSup);
            gm_ = green_numeric::gm(*this);
            partial_gm_ = green_numeric::partial_gm(*this);
            break;
    }
    auto unit = [](double v, const char* name) {
        if (!(v > 0.0))
            throw HypothesisError(std::string(name) + " must be positive, got " + std::to_string(v));
        if (v > 1.0 + kUnitTol) throw HypothesisError(std::string(name) + " exceeds 1: " + std::to_string(v));
        return std::min(v, 1.0);
    };
    eta0_ = unit(eta0_, "Harnack constant eta0");
    c0_inf_ = unit(c0_inf_, "coercivity constant C0 (coercive_inf)");
    c0_sup_ = unit(c0_sup_, "coercivity constant C0 (paper_sup)");
    if (!(gm_ > 0.0) || !(partial_gm_ > 0.0)) throw HypothesisError("Green's function integrals vanish");
}

double BoundaryModel::operator()(double t, double s) const {
    check_unit(t, s);
    switch (kind_) {
        case BoundaryKind::Dirichlet: return t <= s ? t * (1.0 - s) : s * (1.0 - t);
        case BoundaryKind::RightFocal: return std::min(t, s);
        case BoundaryKind::Tabulated: {
            const GreenTable& g = *table_;
            const auto [i, wt] = locate(t, g.t.size());
            const auto [j, ws] = locate(s, g.s.size());
            return (1.0 - wt) * ((1.0 - ws) * g.at(i, j) + ws * g.at(i, j + 1)) +
                   wt * ((1.0 - ws) * g.at(i + 1, j) + ws * g.at(i + 1, j + 1));
        }
    }
    return 0.0;
}

std::vector<double> BoundaryModel::t_kinks(double s) const {
    if (kind_ == BoundaryKind::Tabulated) return table_->t;
    return {s};
}

std::vector<double> BoundaryModel::s_kinks(double t) const {
    if (kind_ == BoundaryKind::Tabulated) return table_->s;
    return {t};
}

double BoundaryModel::script_g(double s) const {
    check_unit(0.0, s);
    switch (kind_) {
        case BoundaryKind::Dirichlet: return s * (1.0 - s);
        case BoundaryKind::RightFocal: return s;
        case BoundaryKind::Tabulated: {
            // The interpolant is piecewise linear in t, so its maximum sits on a node.
            double m = 0.0;
            for (double t : table_->t) m = std::max(m, (*this)(t, s));
            return m;
        }
    }
    return 0.0;
}

double BoundaryModel::column_integral(double s) const {
    check_unit(0.0, s);
    switch (kind_) {
        case BoundaryKind::Dirichlet: return 0.5 * s * (1.0 - s);
        case BoundaryKind::RightFocal: return s - 0.5 * s * s;
        case BoundaryKind::Tabulated:
            return piecewise_integral([&](double t) { return (*this)(t, s); }, 0.0, 1.0, table_->t);
    }
    return 0.0;
}

double BoundaryModel::row_integral(double t, double lo, double hi) const {
    check_unit(t, lo);
    check_unit(t, hi);
    if (lo >= hi) return 0.0;
    return piecewise_integral([&](double s) { return (*this)(t, s); }, lo, hi, s_kinks(t));
}

std::string BoundaryModel::describe() const {
    std::ostringstream out;
    out << to_string(kind_) << "(alpha=" << alpha_ << ", beta=" << beta_ << ", c0_mode=" << to_string(mode_) << ")";
    return out.str();
}

namespace green_numeric {

namespace {

double numeric_script_g(const BoundaryModel& m, double s) {
    return extremize([&](double t) { return m(t, s); }, 0.0, 1.0, m.t_kinks(s), true);
}

double numeric_harnack_min(const BoundaryModel& m, double s) {
    return extremize([&](double t) { return m(t, s); }, m.alpha(), m.beta(), m.t_kinks(s), false);
}

double numeric_column_integral(const BoundaryModel& m, double s) {
    return piecewise_integral([&](double t) { return m(t, s); }, 0.0, 1.0, m.t_kinks(s));
}

/// Extremum over s in [0,1] of ratio(s) = num(s)/script_g(s). Endpoints where
/// script_g vanishes are replaced by the Richardson-extrapolated one-sided
/// limit from s = margin and s = 2 margin.
double ratio_extremum(const BoundaryModel& m, const std::function<double(double)>& num, bool maximize,
                      const Settings& settings) {
    auto ratio = [&](double s) -> std::optional<double> {
        const double g = numeric_script_g(m, s);
        if (g <= 1e-14) return std::nullopt;
        return num(s) / g;
    };
    const double sign = maximize ? 1.0 : -1.0;
    double best = -std::numeric_limits<double>::infinity();
    double best_s = 0.5;
    auto consider = [&](double s, double value) {
        if (sign * value > best) {
            best = sign * value;
            best_s = s;
        }
    };
    const int n = settings.samples;
    for (int k = 0; k <= n; ++k) {
        const double s = static_cast<double>(k) / n;
        if (auto r = ratio(s)) {
            consider(s, *r);
        } else if (k == 0 || k == n) {
            const double dir = k == 0 ? 1.0 : -1.0;
            const double h = settings.endpoint_margin;
            const auto r1 = ratio(s + dir * h);
            const auto r2 = ratio(s + dir * 2.0 * h);
            if (r1 && r2) consider(s, 2.0 * *r1 - *r2);
        }
    }
    double spacing = 1.0 / n;
    for (int round = 0; round < settings.refine_rounds; ++round) {
        const double centre = best_s;
        spacing /= 5.0;
        for (int j = -5; j <= 5; ++j) {
            const double s = centre + j * spacing;
            if (s <= 0.0 || s >= 1.0) continue;
            if (auto r = ratio(s)) consider(s, *r);
        }
    }
    return sign * best;
}

double maximize_row_integral(const BoundaryModel& m, double lo, double hi, const Settings& settings) {
    auto f = [&](double tau) { return m.row_integral(tau, lo, hi); };
    const int n = settings.samples;
    double best = -std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k <= n; ++k) {
        const double v = f(static_cast<double>(k) / n);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    const double a = static_cast<double>(std::max(best_k - 1, 0)) / n;
    const double b = static_cast<double>(std::min(best_k + 1, n)) / n;
    return std::max(best, extremize(f, a, b, {}, true));
}

}  // namespace

double eta0(const BoundaryModel& model, const Settings& settings) {
    return ratio_extremum(model, [&](double s) { return numeric_harnack_min(model, s); }, false, settings);
}

double c0(const BoundaryModel& model, C0Mode mode, const Settings& settings) {
    return ratio_extremum(model, [&](double s) { return numeric_column_integral(model, s); },
                          mode == C0Mode::PaperSup, settings);
}

double gm(const BoundaryModel& model, const Settings& settings) {
    return maximize_row_integral(model, 0.0, 1.0, settings);
}

double partial_gm(const BoundaryModel& model, const Settings& settings) {
    return maximize_row_integral(model, model.alpha(), model.beta(), settings);
}

}  // namespace green_numeric

}  // namespace kvge
