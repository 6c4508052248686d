#include "kforge/cli.hpp"

#include "kforge/error.hpp"
#include "kforge/factorize.hpp"
#include "kforge/gpsim.hpp"
#include "kforge/io.hpp"
#include "kforge/kernels.hpp"
#include "kforge/measures.hpp"
#include "kforge/rkhs.hpp"
#include "kforge/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace kforge::cli {

namespace {

using io::Json;

struct KernelOpts {
    std::string family;
    int truncation = 8;
    std::size_t dimension = 1;
    double scale = 1.0;
    std::string measure = "lebesgue";
    int depth = 0;

    [[nodiscard]] KernelSpec spec() const {
        KernelSpec s;
        s.family = parse_family(family);
        s.truncation = truncation;
        s.dimension = dimension;
        s.scale = scale;
        s.measure = parse_measure(measure, depth);
        if (!(scale > 0.0)) throw InputError("--scale must be positive");
        return s;
    }
};

void add_kernel_options(CLI::App* app, KernelOpts& k) {
    app->add_option("--kernel", k.family,
                    "brownian-min | brownian-line | szego | cantor-product | shannon | drury-arveson | overlap | "
                    "green-1d")
        ->required();
    app->add_option("--truncation", k.truncation, "cantor-product factor count");
    app->add_option("--dimension", k.dimension, "drury-arveson dimension");
    app->add_option("--scale", k.scale, "positive multiplier");
    app->add_option("--measure", k.measure, "overlap measure: lebesgue | cantor4");
    app->add_option("--depth", k.depth, "overlap measure resolution");
}

// Every option that was given or has a default, in declaration order. --threads is left
// out so that reports do not depend on the worker count.
Json config_of(const CLI::App* app) {
    Json cfg = Json::object();
    for (const auto* opt : app->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "threads") continue;
        if (opt->get_type_size() == 0) {
            cfg[name] = opt->count() > 0;
            continue;
        }
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (res.size() == 1) {
                cfg[name] = res.front();
            } else {
                Json arr = Json::array();
                for (const auto& r : res) arr.push_back(r);
                cfg[name] = std::move(arr);
            }
        } else if (!opt->get_default_str().empty()) {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

std::string command_path(const CLI::App* app) {
    std::string path = app->get_name();
    for (const auto* p = app->get_parent(); p && p->get_parent(); p = p->get_parent()) path = p->get_name() + " " + path;
    return path;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    body(f);
    if (!f) throw InputError("failed writing '" + path + "'");
}

Point parse_point(const std::string& text, const std::string& domain_tag) {
    const auto [domain, dim] = parse_domain(domain_tag);
    std::vector<double> coords;
    for (const auto& f : io::split_csv_line(text)) coords.push_back(io::parse_double(f));
    if (domain == Domain::complex_vector && coords.size() != 2 * dim) {
        throw InputError("point needs " + std::to_string(2 * dim) + " coordinates");
    }
    return Point(domain, std::move(coords));
}

std::vector<Point> to_points(std::span<const double> xs, Domain d) {
    std::vector<Point> out;
    for (double x : xs) out.push_back(Point::real(x, d));
    return out;
}

// Drops points with K(p, p) = 0: they are orthogonal to everything and carry no norm.
bool null_point(const KernelSpec& spec, const Point& p) { return eval_kernel(spec, p, p).real() == 0.0; }

SampleSet build_chain(const KernelSpec& spec, const std::string& rule) {
    const auto parts = [&] {
        std::vector<std::string> v;
        std::stringstream ss(rule);
        std::string item;
        while (std::getline(ss, item, ':')) v.push_back(item);
        return v;
    }();
    const auto int_at = [&](std::size_t i) {
        const double v = io::parse_double(parts.at(i));
        if (v != std::floor(v)) throw InputError("chain parameter must be an integer: " + parts.at(i));
        return static_cast<long>(v);
    };
    std::vector<Point> points;
    std::vector<std::size_t> sizes;
    const auto push = [&](double x) {
        auto p = Point::real(x);
        if (!null_point(spec, p)) points.push_back(p);
    };
    if (parts.size() == 2 && parts[0] == "z-window") {
        const long n = int_at(1);
        if (n < 1) throw InputError("z-window needs N >= 1");
        push(0.0);
        for (long k = 1; k <= n; ++k) {
            push(static_cast<double>(k));
            push(-static_cast<double>(k));
            if (!points.empty()) sizes.push_back(points.size());
        }
    } else if (parts.size() == 3 && parts[0] == "dyadic") {
        const long kmin = int_at(1);
        const long kmax = int_at(2);
        if (kmin < 0 || kmax < kmin || kmax > 20) throw InputError("dyadic chain needs 0 <= kmin <= kmax <= 20");
        for (long k = kmin; k <= kmax; ++k) {
            const long count = 1L << k;
            for (long j = 1; j <= count; ++j) {
                if (k > kmin && j % 2 == 0) continue;  // already present at the coarser level
                push(std::ldexp(static_cast<double>(j), static_cast<int>(-k)));
            }
            sizes.push_back(points.size());
        }
    } else {
        throw InputError("unknown chain rule '" + rule + "' (expected z-window:N or dyadic:kmin:kmax)");
    }
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    return SampleSet(std::move(points), std::move(sizes));
}

struct Example {
    FactorizationPair pair;
    KernelSpec spec;
    std::vector<Point> grid;
};

std::vector<Point> disk_points(std::initializer_list<Complex> zs) {
    std::vector<Point> out;
    for (auto z : zs) out.push_back(Point::complex(z));
    return out;
}

Example make_example(const std::string& name, int truncation, const std::string& grid_file) {
    Example ex;
    if (name == "ex1" || name == "mismatch") {
        ex.pair = name == "ex1" ? brownian_pair() : mismatched_pair();
        ex.spec = KernelSpec::brownian_min();
        for (int j = 0; j <= 8; ++j) ex.grid.push_back(Point::real(j / 8.0, Domain::unit_interval));
    } else if (name == "ex2") {
        ex.pair = szego_pair();
        ex.spec = KernelSpec::szego();
        ex.grid = disk_points({{0.0, 0.0}, {0.3, 0.0}, {0.0, 0.5}, {-0.4, 0.2}, {0.2, -0.3}});
    } else if (name == "ex3") {
        ex.pair = cantor_pair(truncation);
        ex.spec = KernelSpec::cantor_product(truncation);
        ex.grid = disk_points({{0.0, 0.0}, {0.4, 0.0}, {0.0, 0.3}, {-0.5, 0.0}, {0.2, 0.3}});
    } else {
        throw InputError("unknown example '" + name + "' (expected ex1, ex2, ex3 or mismatch)");
    }
    if (!grid_file.empty()) ex.grid = io::read_points_file(grid_file).points();
    for (const auto& p : ex.grid) ex.spec.check_domain(p);
    return ex;
}

Json points_json(const std::vector<Point>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(p.to_string());
    return a;
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
        app_.option_defaults()->always_capture_default();
        app_.require_subcommand(1);
        setup();
    }

    int run(const std::vector<std::string>& args) {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app_.parse(rev);
        } catch (const CLI::CallForHelp&) {
            out_ << help_for_parsed();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app_.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n\n" << help_for_parsed();
            return 2;
        }
        for (auto& [sub, handler] : handlers_) {
            if (!sub->parsed()) continue;
            active_ = sub;
            try {
                return handler();
            } catch (const NumericalError& e) {
                err_ << "numerical error: " << e.what() << '\n';
                return 1;
            } catch (const Error& e) {
                err_ << (e.kind() == ErrorKind::domain ? "domain error: " : "input error: ") << e.what() << '\n';
                return 2;
            } catch (const std::exception& e) {
                err_ << "error: " << e.what() << '\n';
                return 2;
            }
        }
        err_ << "error: a subcommand is required\n\n" << app_.help();
        return 2;
    }

private:
    std::string help_for_parsed() const {
        const CLI::App* deepest = &app_;
        for (bool descended = true; descended;) {
            descended = false;
            for (const auto* s : deepest->get_subcommands({})) {
                if (s->parsed()) {
                    deepest = s;
                    descended = true;
                    break;
                }
            }
        }
        return deepest->help();
    }

    CLI::App* command(CLI::App* parent, const std::string& name, const std::string& desc,
                      std::function<int()> handler) {
        auto* sub = parent->add_subcommand(name, desc);
        if (handler) handlers_.emplace_back(sub, std::move(handler));
        return sub;
    }

    void add_seed(CLI::App* sub) { sub->add_option("--seed", seed_, "master seed"); }
    void add_threads(CLI::App* sub) {
        sub->add_option("--threads", threads_, "worker cap (default: KERNEL_FORGE_THREADS or 1)");
    }
    [[nodiscard]] unsigned threads() const { return threads_ > 0 ? threads_ : default_threads(); }

    void report(Json metrics) {
        out_ << io::dump(io::make_report(command_path(active_), config_of(active_), seed_, std::move(metrics)));
    }

    // Raw matrix to --out (plus a report on stdout), or to stdout in csv format, or
    // inside the report in json format.
    void emit_matrix(const ComplexMatrix& m, Json metrics) {
        if (!out_path_.empty()) {
            write_file(out_path_, [&](std::ostream& f) { io::write_matrix(f, m); });
            metrics["output"] = out_path_;
            report(std::move(metrics));
        } else if (format_ == "json") {
            metrics["matrix"] = io::to_json(m);
            report(std::move(metrics));
        } else {
            io::write_matrix(out_, m);
        }
    }

    void add_output(CLI::App* sub) {
        sub->add_option("--format", format_, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", out_path_, "matrix output file");
    }

    void setup() {
        setup_linear_algebra();
        setup_rkhs();
        setup_cantor();
        setup_gpsim();
        setup_sampling();
    }

    void setup_linear_algebra() {
        auto* g = command(&app_, "gram", "Gram matrix of a kernel on a point set", [this] {
            const auto spec = kernel_.spec();
            const auto G = gram(spec, io::read_points_file(points_));
            Json metrics{{"n", G.n()}, {"kernel", spec.name()}};
            std::optional<PsdVerdict> psd;
            if (validate_) {
                psd = validate_psd(G);
                metrics["psd"] = psd->psd;
                metrics["min_eigenvalue"] = psd->min_eigenvalue;
            }
            if (format_ == "json" && out_path_.empty()) {
                metrics["gram"] = io::gram_to_json(G);
                report(std::move(metrics));
            } else {
                emit_matrix(G.entries, std::move(metrics));
            }
            if (psd && !psd->psd) {
                err_ << "Gram matrix is not positive semidefinite (min eigenvalue "
                     << io::format_double(psd->min_eigenvalue) << ")\n";
                return 1;
            }
            return 0;
        });
        add_kernel_options(g, kernel_);
        g->add_option("--points", points_, "points CSV")->required();
        g->add_flag("--validate-psd", validate_, "exit 1 unless the Gram matrix is PSD");
        add_output(g);

        auto* c = command(&app_, "chol", "Cholesky factor of a Gram matrix", [this] {
            const auto spec = kernel_.spec();
            const auto pts = io::read_points_file(points_);
            const auto f = closed_form_ ? brownian_cholesky_closed_form(pts) : cholesky(gram(spec, pts), ridge_);
            emit_matrix(f.L.cast<Complex>(),
                        Json{{"n", pts.size()}, {"ridge_used", f.ridge_used}, {"embedded", f.embedded}});
            return 0;
        });
        add_kernel_options(c, kernel_);
        c->add_option("--points", points_, "points CSV")->required();
        c->add_option("--ridge", ridge_, "diagonal shift");
        c->add_flag("--closed-form", closed_form_, "brownian-min closed form on 0 < x_1 < ...");
        add_output(c);

        auto* v = command(&app_, "inv", "Inverse of a Gram matrix", [this] {
            const auto inv = inverse_gram(gram(kernel_.spec(), io::read_points_file(points_)));
            emit_matrix(inv, Json{{"n", inv.rows()}});
            return 0;
        });
        add_kernel_options(v, kernel_);
        v->add_option("--points", points_, "points CSV")->required();
        add_output(v);

        auto* e = command(&app_, "eig", "Eigenvalues of a Gram matrix", [this] {
            const auto G = gram(kernel_.spec(), io::read_points_file(points_));
            const auto res = method_ == "alt-chol" ? alt_cholesky_eigs(G, max_iter_, eig_tol_) : jacobi_eigs(G);
            report(Json{{"method", method_},
                        {"eigenvalues", res.eigenvalues},
                        {"iterations", res.iterations},
                        {"converged", res.converged}});
            if (!res.converged) {
                err_ << "eigenvalue iteration did not converge\n";
                return 1;
            }
            return 0;
        });
        add_kernel_options(e, kernel_);
        e->add_option("--points", points_, "points CSV")->required();
        e->add_option("--method", method_, "alt-chol | jacobi")->check(CLI::IsMember({"alt-chol", "jacobi"}));
        e->add_option("--max-iter", max_iter_, "alt-chol iteration cap");
        e->add_option("--tol", eig_tol_, "alt-chol off-diagonal tolerance relative to the trace");
    }

    void setup_rkhs() {
        auto* p = command(&app_, "project", "Projection onto span{K(., y) : y in F}", [this] {
            const auto spec = kernel_.spec();
            const auto F = io::read_points_file(points_);
            const auto h = io::read_values_file(values_);
            const auto f = project(spec, F, h);
            Json metrics{{"norm_sq", f.norm_sq()}, {"coefficients", io::to_json(std::vector<Complex>(
                                                                     f.coefficients().data(),
                                                                     f.coefficients().data() + f.coefficients().size()))}};
            if (!eval_.empty()) {
                const auto pts = io::read_points_file(eval_).points();
                metrics["eval_points"] = points_json(pts);
                metrics["values"] = io::to_json(f.evaluate(pts));
            }
            report(std::move(metrics));
            return 0;
        });
        add_kernel_options(p, kernel_);
        p->add_option("--points", points_, "points CSV for F")->required();
        p->add_option("--values", values_, "values CSV of h on F")->required();
        p->add_option("--eval", eval_, "points CSV to evaluate the projection at");

        auto* d = command(&app_, "delta-test", "Finite-norm test for the Dirac mass at x along a chain", [this] {
            const auto spec = kernel_.spec();
            SampleSet chain;
            if (!chain_file_.empty()) {
                chain = io::read_points_file(chain_file_);
            } else if (!chain_rule_.empty()) {
                chain = build_chain(spec, chain_rule_);
            } else {
                throw InputError("delta-test needs --chain or --chain-file");
            }
            const std::string tag = chain.empty() ? "real-line" : chain[0].tag();
            DeltaOptions opts;
            opts.cap = cap_;
            opts.growth = growth_;
            opts.rtol = rtol_;
            const auto r = delta_membership(spec, parse_point(x_, tag), chain, opts);
            Json ratios = Json::array();
            for (std::size_t i = 1; i < r.sequence.size(); ++i) ratios.push_back(r.sequence[i] / r.sequence[i - 1]);
            report(Json{{"sequence", r.sequence},
                        {"level_sizes", r.level_sizes},
                        {"ratios", std::move(ratios)},
                        {"sup", r.sup},
                        {"verdict", membership_name(r.verdict)}});
            return 0;
        });
        add_kernel_options(d, kernel_);
        d->add_option("--x", x_, "the point, comma-separated coordinates")->required();
        d->add_option("--chain", chain_rule_, "z-window:N | dyadic:kmin:kmax");
        d->add_option("--chain-file", chain_file_, "points CSV with a level column");
        d->add_option("--cap", cap_, "divergence cap");
        d->add_option("--growth", growth_, "divergence growth ratio");
        d->add_option("--rtol", rtol_, "convergence tolerance");

        auto* gr = command(&app_, "graph", "Graph with weights K_S^{-1}", [this] {
            const auto g = induced_graph(kernel_.spec(), io::read_points_file(points_), threshold_);
            Json edges = Json::array();
            for (const auto& e : g.edges) edges.push_back(Json{{"i", e.i}, {"j", e.j}, {"weight", io::to_json(e.weight)}});
            report(Json{{"n", g.vertices.size()},
                        {"threshold", g.threshold},
                        {"edges", std::move(edges)},
                        {"weights", io::to_json(g.weights)}});
            return 0;
        });
        add_kernel_options(gr, kernel_);
        gr->add_option("--points", points_, "points CSV")->required();
        gr->add_option("--threshold", threshold_, "edge threshold on |D_ij|");

        auto* in = command(&app_, "interpolate", "Minimal-energy interpolant with f(0) = 0", [this] {
            std::vector<std::pair<double, double>> data;
            for (const auto& row : io::read_table_file(data_)) {
                if (row.size() != 2) throw InputError("interpolation data rows need x,y");
                data.emplace_back(row[0], row[1]);
            }
            const auto it = min_norm_interpolant(data);
            Json metrics{{"norm_sq", it.norm_sq}, {"knots", it.f.xs()}, {"knot_values", it.f.ys()}};
            if (!xs_.empty()) {
                std::vector<double> vals;
                for (double x : xs_) vals.push_back(it.f(x));
                metrics["eval"] = xs_;
                metrics["values"] = vals;
            }
            report(std::move(metrics));
            return 0;
        });
        in->add_option("--data", data_, "CSV with header and x,y rows")->required();
        in->add_option("--eval", xs_, "evaluation points")->delimiter(',');
    }

    void setup_cantor() {
        auto* c = command(&app_, "cantor", "Cantor measure tools", {});
        c->require_subcommand(1);

        auto* cdf = command(c, "cdf", "Distribution function of the Cantor measure", [this] {
            std::vector<double> v;
            for (double x : xs_) v.push_back(mu4_cdf(x));
            report(Json{{"x", xs_}, {"cdf", v}});
            return 0;
        });
        cdf->add_option("--x", xs_, "points in [0,1]")->required()->delimiter(',');

        auto* cl = command(c, "cells", "Partition cells as CSV a,b,mass", [this] {
            const auto part = cells(parse_measure(measure_, depth_), depth_);
            const auto body = [&](std::ostream& o) {
                o << "a,b,mass\n";
                for (const auto& cell : part.cells) {
                    o << io::format_double(cell.a) << ',' << io::format_double(cell.b) << ','
                      << io::format_double(cell.mass) << '\n';
                }
            };
            if (out_path_.empty()) {
                body(out_);
            } else {
                write_file(out_path_, body);
                report(Json{{"cells", part.size()}, {"total_mass", part.total_mass()}, {"output", out_path_}});
            }
            return 0;
        });
        cl->add_option("--depth", depth_, "resolution")->required();
        cl->add_option("--measure", measure_, "cantor4 | lebesgue");
        cl->add_option("--out", out_path_, "output CSV");

        auto* sp = command(c, "spectrum", "Spectrum elements below a limit", [this] {
            report(Json{{"limit", limit_}, {"elements", lambda4(limit_)}});
            return 0;
        });
        sp->add_option("--limit", limit_, "exclusive upper limit")->required();

        auto* fg = command(c, "fourier-gram", "Gram matrix of the first exponentials in L^2 of the Cantor measure", [this] {
            // The k-th spectrum element is k's binary digits read in base 4.
            if (count_ == 0 || count_ > (std::size_t{1} << 31)) throw InputError("--count must be in 1..2^31");
            std::vector<std::uint64_t> chosen;
            for (std::uint64_t k = 0; k < count_; ++k) {
                std::uint64_t lam = 0;
                for (int bit = 0; bit < 32; ++bit) lam |= ((k >> bit) & 1) << (2 * bit);
                chosen.push_back(lam);
            }
            const auto G = fourier_gram(chosen, resolution_);
            ComplexMatrix off = G.entries;
            off.diagonal().setZero();
            report(Json{{"lambdas", chosen},
                        {"resolution", resolution_},
                        {"off_diagonal_inf_norm", inf_norm(off)},
                        {"diagonal_max_error", (G.entries.diagonal().array() - 1.0).abs().maxCoeff()},
                        {"gram", io::to_json(G.entries)}});
            return 0;
        });
        fg->add_option("--count", count_, "number of spectrum elements")->required();
        fg->add_option("--resolution", resolution_, "quadrature depth")->required();

        auto* gf = command(c, "gen-fn", "Truncated generating function of the spectrum", [this] {
            const auto r = generating_function({re_, im_}, truncation_);
            report(Json{{"product", io::to_json(r.product, true)},
                        {"sum", io::to_json(r.sum, true)},
                        {"abs_difference", std::abs(r.product - r.sum)},
                        {"gap_bound", r.gap_bound}});
            return 0;
        });
        gf->add_option("--re", re_, "real part of s")->required();
        gf->add_option("--im", im_, "imaginary part of s");
        gf->add_option("--truncation", truncation_, "number of factors")->required();

        auto* ft = command(c, "fourier", "Fourier transform of the Cantor measure", [this] {
            const auto r = mu4_fourier(t_, truncation_, resolution_);
            report(Json{{"t", t_},
                        {"displayed", io::to_json(r.displayed, true)},
                        {"ifs", io::to_json(r.ifs, true)},
                        {"quadrature", io::to_json(r.quadrature, true)}});
            return 0;
        });
        ft->add_option("--t", t_, "frequency")->required();
        ft->add_option("--truncation", truncation_, "product length")->required();
        ft->add_option("--resolution", resolution_, "quadrature depth")->required();
    }

    void setup_gpsim() {
        auto* s = command(&app_, "simulate", "Sample paths of a factorization example", [this] {
            const auto ex = make_example(example_, truncation_, grid_file_);
            const auto e = ito_synthesize(ex.pair, resolution_, ex.grid, paths_, seed_, threads());
            const bool complex = !e.is_real();
            std::vector<double> var;
            const auto C = empirical_covariance(e);
            for (Eigen::Index i = 0; i < C.rows(); ++i) var.push_back(C(i, i).real());
            Json metrics{{"n_paths", paths_},
                         {"grid", points_json(ex.grid)},
                         {"max_abs_mean", max_abs_mean(e)},
                         {"mean_tolerance", 5.0 * std::sqrt(var.empty() ? 0.0 : *std::max_element(var.begin(), var.end()) /
                                                                                        static_cast<double>(paths_))},
                         {"variance", var}};
            if (out_path_.empty()) {
                io::write_paths(out_, ex.grid, e.paths, complex);
            } else {
                write_file(out_path_, [&](std::ostream& f) { io::write_paths(f, ex.grid, e.paths, complex); });
                metrics["output"] = out_path_;
                report(std::move(metrics));
            }
            return 0;
        });
        add_example_options(s);
        s->add_option("--paths", paths_, "number of paths")->check(CLI::PositiveNumber);
        s->add_option("--out", out_path_, "paths CSV");

        auto* cc = command(&app_, "covcheck", "Empirical covariance of sampled Gaussian vectors against G", [this] {
            const auto G = gram(kernel_.spec(), io::read_points_file(points_));
            const auto e = sample_gaussian_vector(G, paths_, seed_, threads());
            const auto C = empirical_covariance(e);
            const double err = max_abs(C - G.entries);
            const double tol = 5.0 * max_abs(G.entries) / std::sqrt(static_cast<double>(paths_));
            report(Json{{"n_paths", paths_},
                        {"max_abs_error", err},
                        {"tolerance", tol},
                        {"max_abs_mean", max_abs_mean(e)},
                        {"pass", err <= tol}});
            return err <= tol ? 0 : 1;
        });
        add_kernel_options(cc, kernel_);
        cc->add_option("--points", points_, "points CSV")->required();
        cc->add_option("--paths", paths_, "number of paths")->check(CLI::Range(2, 100000000));
        add_seed(cc);
        add_threads(cc);

        auto* q = command(&app_, "qvar", "Quadratic variation of the Wiener process", [this] {
            const auto levels =
                quadratic_variation(parse_measure(qvar_measure_, 0), a_, b_, resolutions_, paths_, seed_, threads());
            Json out = Json::array();
            bool pass = true;
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const auto& l = levels[i];
                const bool mean_ok = std::abs(l.mean_q - l.measure) <= l.mean_tolerance;
                pass = pass && mean_ok;
                Json row{{"resolution", l.resolution},
                         {"cells", l.cells},
                         {"measure", l.measure},
                         {"mean_q", l.mean_q},
                         {"mean_error", std::abs(l.mean_q - l.measure)},
                         {"mean_tolerance", l.mean_tolerance},
                         {"mean_pass", mean_ok},
                         {"mse", l.mse},
                         {"mse_theory", l.mse_theory}};
                if (i > 0) row["mse_ratio"] = l.mse / levels[i - 1].mse;
                out.push_back(std::move(row));
            }
            report(Json{{"n_paths", paths_}, {"levels", std::move(out)}, {"pass", pass}});
            return pass ? 0 : 1;
        });
        q->add_option("--measure", qvar_measure_, "lebesgue | cantor4");
        q->add_option("--a", a_, "left end of A");
        q->add_option("--b", b_, "right end of A");
        q->add_option("--resolutions", resolutions_, "comma-separated resolutions")->delimiter(',');
        q->add_option("--paths", paths_, "number of paths")->check(CLI::PositiveNumber);
        add_seed(q);
        add_threads(q);

        auto* du = command(&app_, "duality", "Quadrature and Monte Carlo check of a factorization", [this] {
            const auto ex = make_example(example_, truncation_, grid_file_);
            const auto r = duality_check(ex.pair, ex.spec, ex.grid, resolution_, paths_, seed_, threads());
            report(Json{{"pair", r.pair_name},
                        {"kernel", r.kernel_name},
                        {"grid", points_json(ex.grid)},
                        {"resolution", r.resolution},
                        {"n_paths", r.n_paths},
                        {"max_abs_kernel", r.max_abs_kernel},
                        {"quadrature", Json{{"max_abs_error", r.quadrature_error},
                                            {"tolerance", r.quadrature_tolerance},
                                            {"pass", r.quadrature_pass}}},
                        {"monte_carlo", Json{{"max_abs_error", r.mc_error},
                                             {"tolerance", r.mc_tolerance},
                                             {"pass", r.mc_pass}}},
                        {"pass", r.pass()}});
            return r.pass() ? 0 : 1;
        });
        add_example_options(du);
        du->add_option("--paths", paths_, "number of paths")->check(CLI::PositiveNumber);
    }

    void add_example_options(CLI::App* sub) {
        sub->add_option("--example", example_, "ex1 | ex2 | ex3 | mismatch")->required();
        sub->add_option("--resolution", resolution_, "partition resolution");
        sub->add_option("--grid-file", grid_file_, "grid points CSV");
        sub->add_option("--truncation", truncation_, "ex3 product length");
        add_seed(sub);
        add_threads(sub);
    }

    void setup_sampling() {
        auto* f = command(&app_, "frame", "Frames and sampling", {});
        f->require_subcommand(1);

        auto* chk = command(f, "check", "Parseval test of {K(., s)}", [this] {
            const auto spec = kernel_.spec();
            SampleSet S;
            std::size_t truncation = 0;
            if (!points_.empty()) {
                S = io::read_points_file(points_);
                truncation = S.size();
            } else if (integers_ > 0) {
                S = integer_samples(integers_, positive_);
                truncation = integers_;
            } else {
                throw InputError("frame check needs --points or --integers");
            }
            const auto r = parseval_check(spec, S, to_points(xs_, Domain::real_line), truncation, tol_);
            Json pts = Json::array();
            for (const auto& p : r.points) {
                Json row{{"x", p.x.to_string()},
                         {"diagonal", p.diagonal},
                         {"partial_sum", p.partial_sum},
                         {"deficit", p.deficit}};
                row["tail_bound"] = p.tail_bound ? Json(*p.tail_bound) : Json(nullptr);
                pts.push_back(std::move(row));
            }
            Json metrics{{"truncation", r.truncation},
                         {"sample_size", S.size()},
                         {"parseval_deficit", r.parseval_deficit},
                         {"tolerance", r.tolerance},
                         {"points", std::move(pts)},
                         {"verdict", verdict_name(r.verdict)},
                         {"scope", "bounds hold on the span of the truncated system only"}};
            metrics["lower_bound"] = r.lower_bound ? Json(*r.lower_bound) : Json(nullptr);
            metrics["upper_bound"] = r.upper_bound ? Json(*r.upper_bound) : Json(nullptr);
            report(std::move(metrics));
            return 0;
        });
        add_kernel_options(chk, kernel_);
        chk->add_option("--points", points_, "sample set CSV");
        chk->add_option("--integers", integers_, "use the integers -N..N (or 1..N with --positive)");
        chk->add_flag("--positive", positive_, "positive integers only");
        chk->add_option("--test", xs_, "test points")->delimiter(',')->required();
        chk->add_option("--tol", tol_, "deficit tolerance");

        auto* bd = command(f, "bounds", "Frame bounds on span{K(., s)}", [this] {
            const auto b = frame_bounds(kernel_.spec(), io::read_points_file(points_));
            report(Json{{"lower_bound", b.lower},
                        {"upper_bound", b.upper},
                        {"scope", "bounds hold on the span of the truncated system only"}});
            return 0;
        });
        add_kernel_options(bd, kernel_);
        bd->add_option("--points", points_, "sample set CSV")->required();

        auto* rc = command(f, "reconstruct", "Frame-operator reconstruction from samples", [this] {
            const auto spec = kernel_.spec();
            const auto S = io::read_points_file(points_);
            const auto pts = io::read_points_file(eval_).points();
            const auto v = frame_reconstruct(spec, S, io::read_values_file(values_), pts);
            report(Json{{"eval_points", points_json(pts)}, {"values", io::to_json(v)}});
            return 0;
        });
        add_kernel_options(rc, kernel_);
        rc->add_option("--points", points_, "sample set CSV")->required();
        rc->add_option("--values", values_, "values CSV of f on S")->required();
        rc->add_option("--eval", eval_, "points CSV")->required();

        auto* w = command(&app_, "witness", "Witness functions", {});
        w->require_subcommand(1);
        auto* st = command(w, "sawtooth", "Nonzero finite-energy function vanishing on the knots", [this] {
            std::vector<double> knots;
            for (const auto& row : io::read_table_file(knots_)) {
                if (row.size() != 1) throw InputError("knots file needs one column");
                knots.push_back(row[0]);
            }
            SawtoothWitness wt;
            if (rule_ == "harmonic") {
                wt = sawtooth_witness(knots);
            } else {
                if (slopes_.empty()) throw InputError("--rule custom needs --slopes");
                wt = sawtooth_witness(knots, slopes_);
            }
            std::vector<double> at_knots;
            std::vector<double> apex;
            for (double x : wt.knots) at_knots.push_back(wt(x));
            for (std::size_t n = 0; n + 1 < wt.knots.size(); ++n) apex.push_back(wt((wt.knots[n] + wt.knots[n + 1]) / 2));
            Json metrics{{"knots", wt.knots},
                         {"slopes", wt.slopes},
                         {"norm_sq", wt.norm_sq},
                         {"norm_sq_partial", wt.norm_sq_partial},
                         {"knot_values", at_knots},
                         {"apex_values", apex},
                         {"inner_products", wt.inner_products()}};
            if (!xs_.empty()) {
                std::vector<double> vals;
                for (double x : xs_) vals.push_back(wt(x));
                metrics["eval"] = xs_;
                metrics["values"] = vals;
            }
            report(std::move(metrics));
            return 0;
        });
        st->add_option("--knots", knots_, "CSV with a header and one knot per row")->required();
        st->add_option("--rule", rule_, "harmonic | custom")->check(CLI::IsMember({"harmonic", "custom"}));
        st->add_option("--slopes", slopes_, "custom slopes, one per gap")->delimiter(',');
        st->add_option("--eval", xs_, "evaluation points")->delimiter(',');
    }

    std::ostream& out_;
    std::ostream& err_;
    CLI::App app_{"Reproducing-kernel and Gaussian-process toolkit", "kernel-forge"};
    std::vector<std::pair<CLI::App*, std::function<int()>>> handlers_;
    const CLI::App* active_ = nullptr;

    KernelOpts kernel_;
    std::string points_;
    std::string values_;
    std::string eval_;
    std::string format_ = "csv";
    std::string out_path_;
    bool validate_ = false;
    bool closed_form_ = false;
    double ridge_ = 0.0;
    std::string method_ = "jacobi";
    int max_iter_ = 500;
    double eig_tol_ = 1e-12;

    std::string x_;
    std::string chain_rule_;
    std::string chain_file_;
    double cap_ = 1e6;
    double growth_ = 1.5;
    double rtol_ = 1e-9;
    std::optional<double> threshold_;
    std::string data_;
    std::vector<double> xs_;

    std::string measure_ = "cantor4";
    std::string qvar_measure_ = "lebesgue";
    int depth_ = 0;
    std::uint64_t limit_ = 0;
    std::size_t count_ = 8;
    int resolution_ = 10;
    double re_ = 0.0;
    double im_ = 0.0;
    int truncation_ = 4;
    double t_ = 0.0;

    std::string example_;
    std::string grid_file_;
    std::size_t paths_ = 10000;
    std::uint64_t seed_ = 0;
    unsigned threads_ = 0;
    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<int> resolutions_{4, 5, 6, 7, 8, 9, 10};

    std::size_t integers_ = 0;
    bool positive_ = false;
    double tol_ = 1e-10;

    std::string knots_;
    std::string rule_ = "harmonic";
    std::vector<double> slopes_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Runner r(out, err);
    return r.run(args);
}

}  // namespace kforge::cli
