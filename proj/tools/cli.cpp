#include "cli.hpp"

#include "hopls/cv.hpp"
#include "hopls/errors.hpp"
#include "hopls/io.hpp"
#include "hopls/metrics.hpp"
#include "hopls/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace hopls::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Flag combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "+inf") return kNoiseless;
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
        throw UsageError("invalid SNR '" + text + "' (expected a number of dB or 'inf')");
    }
    return v;
}

std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_snr(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + num(values[i]);
    return s;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw FormatError("error writing '" + path.string() + "'");
}

json shape_json(const Shape& s) { return std::vector<std::size_t>(s.dims().begin(), s.dims().end()); }

// --- synth ----------------------------------------------------------------

struct SynthArgs {
    std::string case_tag;
    std::string snr = "inf";
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SynthSpec spec;
    try {
        spec = SynthSpec::for_case(a.case_tag, parse_snr(a.snr), a.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const SynthDataset data = generate(spec);
    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create '" + dir.string() + "': " + ec.message());

    write_tensor_file(dir / "X.ten", data.calibration.x);
    write_tensor_file(dir / "Y.ten", data.calibration.y);
    write_tensor_file(dir / "Xv.ten", data.validation.x);
    write_tensor_file(dir / "Yv.ten", data.validation.y);

    const bool clean = data.calibration.x == data.calibration.clean_x && data.calibration.y == data.calibration.clean_y &&
                       data.validation.x == data.validation.clean_x && data.validation.y == data.validation.clean_y;
    json manifest = {
        {"case", a.case_tag},
        {"kind", std::string(to_string(spec.kind))},
        {"x_shape", shape_json(data.calibration.x.shape())},
        {"y_shape", shape_json(data.calibration.y.shape())},
        {"validation_x_shape", shape_json(data.validation.x.shape())},
        {"validation_y_shape", shape_json(data.validation.y.shape())},
        {"latent", spec.latent},
        {"core_rank", spec.core_rank},
        {"loadings", std::string(to_string(spec.loadings))},
        {"snr_db", num_json(spec.snr_db)},
        {"seed", spec.seed},
        {"clean", clean},
        {"realized_snr_db",
         {{"X", num_json(data.calibration.snr_x_db)},
          {"Y", num_json(data.calibration.snr_y_db)},
          {"Xv", num_json(data.validation.snr_x_db)},
          {"Yv", num_json(data.validation.snr_y_db)}}},
        {"files", {"X.ten", "Y.ten", "Xv.ten", "Yv.ten"}},
    };
    write_json(dir / "manifest.json", manifest);
    out << "case=" << a.case_tag << '\n'
        << "x_shape=" << data.calibration.x.shape().to_string() << '\n'
        << "y_shape=" << data.calibration.y.shape().to_string() << '\n'
        << "snr_x_db=" << num(data.calibration.snr_x_db) << '\n'
        << "snr_y_db=" << num(data.calibration.snr_y_db) << '\n';
    return kOk;
}

// --- fit ------------------------------------------------------------------

struct FitArgs {
    std::string algo;
    std::string x, y, out;
    std::size_t r = 0;
    std::optional<std::size_t> lambda;
    std::vector<std::size_t> l, k;
    bool no_center = false;
};

AnyModel fit_from_args(const FitArgs& a, Algorithm algo, const DenseTensor& x, const DenseTensor& y) {
    const bool lists = !a.l.empty() || !a.k.empty();
    if ((algo == Algorithm::npls || algo == Algorithm::pls) && (a.lambda || lists)) {
        throw UsageError(std::string(to_string(algo)) + " takes no loading counts; drop --lambda/--l/--k");
    }
    if ((algo == Algorithm::hopls || algo == Algorithm::hopls2) && !a.lambda && !lists) {
        throw UsageError(std::string(to_string(algo)) + " needs --lambda or --l/--k");
    }
    if (algo == Algorithm::hopls && y.order() < 3) {
        throw DimensionError("hopls needs a response of order >= 3, got " + y.shape().to_string() + "; use hopls2");
    }
    if (algo == Algorithm::hopls2 && !a.k.empty()) throw UsageError("hopls2 takes no --k (the response is a matrix)");
    if (!lists) return fit_model(algo, x, y, a.r, *a.lambda, !a.no_center);

    FitConfig cfg;
    cfg.components = a.r;
    cfg.x_ranks = a.l;
    cfg.y_ranks = a.k;
    cfg.center = !a.no_center;
    if (algo == Algorithm::hopls2) {
        if (y.order() != 2) throw DimensionError("hopls2 needs a matrix response, got " + y.shape().to_string());
        return fit_hopls2(x, y.to_matrix(), cfg);
    }
    return fit_hopls(x, y, cfg);
}

template <class M>
void print_norms(const M& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.x_residual_norms.size(); ++i) {
        out << "residual[" << i << "] x=" << num(m.x_residual_norms[i]) << " y=" << num(m.y_residual_norms[i]) << '\n';
    }
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
    Algorithm algo;
    try {
        algo = parse_algorithm(a.algo);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.r < 1) throw UsageError("--r must be >= 1");
    if (a.lambda && (a.l.size() || a.k.size())) throw UsageError("--lambda conflicts with --l/--k");
    const DenseTensor x = read_tensor_file(a.x);
    const DenseTensor y = read_tensor_file(a.y);
    const AnyModel model = fit_from_args(a, algo, x, y);
    save_model(a.out, model, a.algo);

    out << "algorithm=" << a.algo << '\n' << "components=" << model_rank(model) << '\n';
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UnfoldedPlsModel>) {
                print_norms(m.pls, out);
            } else {
                out << "stop=" << to_string(m.stop) << '\n';
                print_norms(m, out);
            }
        },
        model);
    out << "train_q2=" << num(q_squared(y, predict(model, x))) << '\n'
        << "checksum=" << model_checksum(model) << '\n';
    return kOk;
}

// --- predict / eval -------------------------------------------------------

struct PredictArgs {
    std::string model, x, out;
};

int cmd_predict(const PredictArgs& a) {
    const LoadedModel loaded = load_model(a.model);
    write_tensor_file(a.out, predict(loaded.model, read_tensor_file(a.x)));
    return kOk;
}

struct EvalArgs {
    std::string y_true, y_pred;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const Metrics m = evaluate(read_tensor_file(a.y_true), read_tensor_file(a.y_pred));
    out << "q2=" << num(m.q2) << '\n'
        << "rmsep=" << num(m.rmsep) << '\n'
        << "corr=" << join(m.corr_per_column) << '\n'
        << "q2_per_column=" << join(m.q2_per_column) << '\n';
    return kOk;
}

// --- cv -------------------------------------------------------------------

struct CvArgs {
    std::string algo, x, y, out;
    std::size_t folds = 5;
    std::size_t r_max = 10;
    std::size_t lambda_max = 10;
    bool no_center = false;
};

json cell_json(const CvCell& c) {
    return {{"components", c.components}, {"lambda", c.lambda}, {"mean_q2", c.mean_q2}, {"fold_q2", c.fold_q2}};
}

int cmd_cv(const CvArgs& a, std::ostream& out) {
    Algorithm algo;
    try {
        algo = parse_algorithm(a.algo);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const DenseTensor x = read_tensor_file(a.x);
    const DenseTensor y = read_tensor_file(a.y);
    GridSearch g;
    g.folds = a.folds;
    g.r_max = a.r_max;
    g.lambda_max = a.lambda_max;
    g.center = !a.no_center;
    const CvReport rep = cv_grid_search(x, y, algo, g);

    for (const CvCell& c : rep.grid) {
        out << "cell R=" << c.components << " lambda=" << c.lambda << " mean_q2=" << num(c.mean_q2)
            << " fold_q2=" << join(c.fold_q2) << '\n';
    }
    const CvCell& best = rep.best();
    out << "best R=" << best.components << " lambda=" << best.lambda << " mean_q2=" << num(best.mean_q2) << '\n';

    if (!a.out.empty()) {
        json grid = json::array();
        for (const CvCell& c : rep.grid) grid.push_back(cell_json(c));
        write_json(a.out, {{"algorithm", std::string(to_string(rep.algo))},
                           {"folds", rep.folds},
                           {"r_max", a.r_max},
                           {"lambda_max", a.lambda_max},
                           {"center", !a.no_center},
                           {"grid", grid},
                           {"best", cell_json(best)}});
    }
    return kOk;
}

// --- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string case_tag, out;
    std::size_t repeats = 50;
    std::string snr_list = "10,5,0,-5";
    std::uint64_t seed = 0;
    std::vector<std::string> methods;
    std::size_t folds = 5;
    std::size_t r_max = 10;
    std::size_t lambda_max = 10;
};

json quantiles_json(const Quantiles& q) {
    return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    SynthSpec spec;
    BenchSettings s;
    try {
        spec = SynthSpec::for_case(a.case_tag, kNoiseless, 0);
        for (const auto& m : a.methods) s.methods.push_back(parse_algorithm(m));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.repeats < 1) throw UsageError("--repeats must be >= 1");
    s.repeats = a.repeats;
    s.snrs = parse_snr_list(a.snr_list);
    s.seed = a.seed;
    s.search.folds = a.folds;
    s.search.r_max = a.r_max;
    s.search.lambda_max = a.lambda_max;

    const std::vector<BenchRow> rows = benchmark_sweep(spec, s);

    json jrows = json::array();
    std::vector<std::string> methods;
    for (const BenchRow& r : rows) {
        const std::string m(to_string(r.method));
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
        jrows.push_back({{"snr_db", num_json(r.snr_db)},
                         {"repeat", r.repeat},
                         {"method", m},
                         {"components", r.components},
                         {"lambda", r.lambda},
                         {"q2", r.q2},
                         {"rmsep", r.rmsep}});
    }
    json summary = json::array();
    for (double snr : s.snrs) {
        for (const auto& m : methods) {
            std::vector<double> q2, err;
            for (const BenchRow& r : rows) {
                if (r.snr_db == snr && to_string(r.method) == m) {
                    q2.push_back(r.q2);
                    err.push_back(r.rmsep);
                }
            }
            if (q2.empty()) continue;
            const Quantiles q = quantiles(q2);
            summary.push_back({{"snr_db", num_json(snr)},
                               {"method", m},
                               {"count", q2.size()},
                               {"q2", quantiles_json(q)},
                               {"rmsep", quantiles_json(quantiles(err))}});
            out << "snr=" << num(snr) << " method=" << m << " median_q2=" << num(q.median) << " q1=" << num(q.q1)
                << " q3=" << num(q.q3) << '\n';
        }
    }
    std::vector<json> snrs;
    for (double v : s.snrs) snrs.push_back(num_json(v));
    json report = {{"case", a.case_tag},
                   {"seed", a.seed},
                   {"repeats", a.repeats},
                   {"snr_db", snrs},
                   {"methods", methods},
                   {"folds", a.folds},
                   {"r_max", a.r_max},
                   {"lambda_max", a.lambda_max},
                   {"rows", jrows},
                   {"summary", summary}};
    if (!a.out.empty()) write_json(a.out, report);
    out << "rows=" << rows.size() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Higher-order partial least squares: synthetic data, fitting, prediction and evaluation", "hopls"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a calibration/validation pair for a benchmark case");
    s->add_option("--case", synth.case_tag, "1m, 2m, 3m, 1t, 2t or mr")->required();
    s->add_option("--snr", synth.snr, "Noise level in dB, or inf for clean data")->capture_default_str();
    s->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    s->add_option("--out-dir", synth.out_dir, "Directory for X.ten, Y.ten, Xv.ten, Yv.ten and manifest.json")->required();

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit a model and save it");
    f->add_option("--algo", fit.algo, "hopls, hopls2, npls or pls")->required();
    f->add_option("--x", fit.x, "Predictor tensor file")->required();
    f->add_option("--y", fit.y, "Response tensor file")->required();
    f->add_option("--r", fit.r, "Number of components")->required();
    auto* lam = f->add_option("--lambda", fit.lambda, "Loadings per trailing mode (L_n = K_m = lambda)");
    auto* lopt = f->add_option("--l", fit.l, "Comma-separated X loading counts L_2..L_N")->delimiter(',');
    auto* kopt = f->add_option("--k", fit.k, "Comma-separated Y loading counts K_2..K_M")->delimiter(',');
    lam->excludes(lopt)->excludes(kopt);
    f->add_option("--out", fit.out, "Model file to write")->required();
    f->add_flag("--no-center", fit.no_center, "Do not remove the mode-1 means");

    PredictArgs pred;
    auto* p = app.add_subcommand("predict", "Predict responses with a saved model");
    p->add_option("--model", pred.model, "Model file")->required();
    p->add_option("--x", pred.x, "Predictor tensor file")->required();
    p->add_option("--out", pred.out, "Tensor file for the prediction")->required();

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Compare a prediction with the truth");
    e->add_option("--y-true", ev.y_true, "Reference tensor file")->required();
    e->add_option("--y-pred", ev.y_pred, "Predicted tensor file")->required();

    CvArgs cv;
    auto* c = app.add_subcommand("cv", "Grid search over R and lambda by k-fold cross-validation");
    c->add_option("--algo", cv.algo, "hopls, hopls2, npls or pls")->required();
    c->add_option("--x", cv.x, "Predictor tensor file")->required();
    c->add_option("--y", cv.y, "Response tensor file")->required();
    c->add_option("--folds", cv.folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    c->add_option("--r-max", cv.r_max, "Largest number of components")->capture_default_str()->check(CLI::Range(1, 1 << 20));
    c->add_option("--lambda-max", cv.lambda_max, "Largest loading count")->capture_default_str()->check(CLI::Range(1, 1 << 20));
    c->add_option("--out", cv.out, "Optional JSON report");
    c->add_flag("--no-center", cv.no_center, "Do not remove the mode-1 means");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Repeated generate / cross-validate / validate runs over SNR levels");
    b->add_option("--case", bench.case_tag, "1m, 2m, 3m, 1t, 2t or mr")->required();
    b->add_option("--repeats", bench.repeats, "Data sets per SNR level")->capture_default_str();
    b->add_option("--snr-list", bench.snr_list, "Comma-separated SNR levels in dB")->capture_default_str();
    b->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
    b->add_option("--methods", bench.methods, "Comma-separated methods (default: hopls or hopls2, npls, pls)")
        ->delimiter(',');
    b->add_option("--folds", bench.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    b->add_option("--r-max", bench.r_max, "Largest number of components")->capture_default_str()->check(CLI::Range(1, 1 << 20));
    b->add_option("--lambda-max", bench.lambda_max, "Largest loading count")->capture_default_str()->check(CLI::Range(1, 1 << 20));
    b->add_option("--out", bench.out, "JSON report");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& ex) {
        err << "usage error: " << ex.what() << '\n';
        if (!app.get_subcommands().empty()) {
            err << app.get_subcommands().front()->help();
        } else {
            err << app.help();
        }
        return kUsage;
    }

    try {
        if (s->parsed()) return cmd_synth(synth, out);
        if (f->parsed()) return cmd_fit(fit, out);
        if (p->parsed()) return cmd_predict(pred);
        if (e->parsed()) return cmd_eval(ev, out);
        if (c->parsed()) return cmd_cv(cv, out);
        if (b->parsed()) return cmd_bench(bench, out);
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return kUsage;
    } catch (const FormatError& ex) {
        err << "parse error: " << ex.what() << '\n';
        return kParse;
    } catch (const DimensionError& ex) {
        err << "dimension error: " << ex.what() << '\n';
        return kDimension;
    } catch (const NumericalError& ex) {
        err << "numerical error: " << ex.what() << '\n';
        return kNumerical;
    } catch (const ConvergenceError& ex) {
        err << "numerical error: " << ex.what() << '\n';
        return kNumerical;
    }
    err << "usage error: no command given\n";
    return kUsage;
}

}  // namespace hopls::cli
