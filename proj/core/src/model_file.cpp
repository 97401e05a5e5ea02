#include "hopls/errors.hpp"
#include "hopls/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>

namespace hopls {

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

namespace {

using json = nlohmann::json;

constexpr std::string_view kFormatName = "hopls-model";

std::string fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- encoding -------------------------------------------------------------

json enc(const Shape& s) { return json(std::vector<std::size_t>(s.dims().begin(), s.dims().end())); }

json enc(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json enc(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json enc(const DenseTensor& t) {
    return {{"shape", enc(t.shape())}, {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

json enc(const std::vector<Matrix>& ms) {
    json out = json::array();
    for (const auto& m : ms) out.push_back(enc(m));
    return out;
}

template <class T>
json enc_opt(const std::optional<T>& v) {
    return v ? enc(*v) : json(nullptr);
}

json enc(const FitConfig& c) {
    return {{"components", c.components},
            {"x_ranks", c.x_ranks},
            {"y_ranks", c.y_ranks},
            {"epsilon", c.epsilon ? json(*c.epsilon) : json(nullptr)},
            {"center", c.center},
            {"hooi", {{"max_iters", c.hooi.max_iters}, {"rel_tol", c.hooi.rel_tol}}}};
}

json encode_payload(const HoplsModel& m) {
    json comps = json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"t", enc(c.t)},
                         {"p", enc(c.p)},
                         {"q", enc(c.q)},
                         {"g", enc(c.g)},
                         {"d", enc(c.d)},
                         {"x_weight", enc(c.x_weight)}});
    }
    return {{"config", enc(m.config)},
            {"x_shape", enc(m.x_shape)},
            {"y_shape", enc(m.y_shape)},
            {"x_mean", enc_opt(m.x_mean)},
            {"y_mean", enc_opt(m.y_mean)},
            {"components", comps},
            {"x_residual_norms", m.x_residual_norms},
            {"y_residual_norms", m.y_residual_norms},
            {"stop", std::string(to_string(m.stop))}};
}

json encode_payload(const Hopls2Model& m) {
    json comps = json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"t", enc(c.t)},
                         {"p", enc(c.p)},
                         {"g", enc(c.g)},
                         {"q", enc(c.q)},
                         {"d", c.d},
                         {"u", enc(c.u)},
                         {"x_weight", enc(c.x_weight)}});
    }
    return {{"config", enc(m.config)},
            {"x_shape", enc(m.x_shape)},
            {"responses", m.responses},
            {"x_mean", enc_opt(m.x_mean)},
            {"y_mean", enc_opt(m.y_mean)},
            {"components", comps},
            {"x_residual_norms", m.x_residual_norms},
            {"y_residual_norms", m.y_residual_norms},
            {"stop", std::string(to_string(m.stop))}};
}

json encode_payload(const UnfoldedPlsModel& m) {
    const PlsModel& p = m.pls;
    return {{"x_shape", enc(m.x_shape)},
            {"y_shape", enc(m.y_shape)},
            {"w", enc(p.w)},
            {"t", enc(p.t)},
            {"p", enc(p.p)},
            {"q", enc(p.q)},
            {"u", enc(p.u)},
            {"d", enc(p.d)},
            {"center", p.center},
            {"x_mean", enc(p.x_mean)},
            {"y_mean", enc(p.y_mean)},
            {"x_residual_norms", p.x_residual_norms},
            {"y_residual_norms", p.y_residual_norms},
            {"inner_iterations", p.inner_iterations}};
}

std::string_view tag_of(const AnyModel& model) {
    switch (model.index()) {
        case 0: return "hopls";
        case 1: return "hopls2";
        default: return "pls";
    }
}

json encode_payload(const AnyModel& model) {
    return std::visit([](const auto& m) { return encode_payload(m); }, model);
}

// --- decoding -------------------------------------------------------------

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("model file: missing field '") + key + "'");
    return j.at(key);
}

Shape dec_shape(const json& j) { return Shape(j.get<std::vector<std::size_t>>()); }

Vector dec_vector(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix dec_matrix(const json& j) {
    const auto rows = field(j, "rows").get<Eigen::Index>();
    const auto cols = field(j, "cols").get<Eigen::Index>();
    const auto data = field(j, "data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
        throw FormatError("model file: matrix data does not match its size");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[static_cast<std::size_t>(i * cols + j2)];
    return m;
}

std::vector<Matrix> dec_matrices(const json& j) {
    std::vector<Matrix> out;
    for (const auto& m : j) out.push_back(dec_matrix(m));
    return out;
}

DenseTensor dec_tensor(const json& j) {
    return DenseTensor(dec_shape(field(j, "shape")), field(j, "data").get<std::vector<double>>());
}

std::optional<DenseTensor> dec_opt_tensor(const json& j) {
    if (j.is_null()) return std::nullopt;
    return dec_tensor(j);
}

StopReason dec_stop(const json& j) {
    const auto s = j.get<std::string>();
    for (StopReason r : {StopReason::completed, StopReason::residual_threshold, StopReason::zero_cross_covariance,
                         StopReason::degenerate_core}) {
        if (to_string(r) == s) return r;
    }
    throw FormatError("model file: unknown stop reason '" + s + "'");
}

FitConfig dec_config(const json& j) {
    FitConfig c;
    c.components = field(j, "components").get<std::size_t>();
    c.x_ranks = field(j, "x_ranks").get<std::vector<std::size_t>>();
    c.y_ranks = field(j, "y_ranks").get<std::vector<std::size_t>>();
    if (const json& e = field(j, "epsilon"); !e.is_null()) c.epsilon = e.get<double>();
    c.center = field(j, "center").get<bool>();
    const json& h = field(j, "hooi");
    c.hooi.max_iters = field(h, "max_iters").get<decltype(c.hooi.max_iters)>();
    c.hooi.rel_tol = field(h, "rel_tol").get<double>();
    return c;
}

HoplsModel decode_hopls(const json& j) {
    HoplsModel m;
    m.config = dec_config(field(j, "config"));
    m.x_shape = dec_shape(field(j, "x_shape"));
    m.y_shape = dec_shape(field(j, "y_shape"));
    m.x_mean = dec_opt_tensor(field(j, "x_mean"));
    m.y_mean = dec_opt_tensor(field(j, "y_mean"));
    for (const auto& c : field(j, "components")) {
        HoplsComponent comp;
        comp.t = dec_vector(field(c, "t"));
        comp.p = dec_matrices(field(c, "p"));
        comp.q = dec_matrices(field(c, "q"));
        comp.g = dec_tensor(field(c, "g"));
        comp.d = dec_tensor(field(c, "d"));
        comp.x_weight = dec_vector(field(c, "x_weight"));
        m.components.push_back(std::move(comp));
    }
    m.x_residual_norms = field(j, "x_residual_norms").get<std::vector<double>>();
    m.y_residual_norms = field(j, "y_residual_norms").get<std::vector<double>>();
    m.stop = dec_stop(field(j, "stop"));
    return m;
}

Hopls2Model decode_hopls2(const json& j) {
    Hopls2Model m;
    m.config = dec_config(field(j, "config"));
    m.x_shape = dec_shape(field(j, "x_shape"));
    m.responses = field(j, "responses").get<std::size_t>();
    m.x_mean = dec_opt_tensor(field(j, "x_mean"));
    if (const json& ym = field(j, "y_mean"); !ym.is_null()) m.y_mean = dec_vector(ym);
    for (const auto& c : field(j, "components")) {
        Hopls2Component comp;
        comp.t = dec_vector(field(c, "t"));
        comp.p = dec_matrices(field(c, "p"));
        comp.g = dec_tensor(field(c, "g"));
        comp.q = dec_vector(field(c, "q"));
        comp.d = field(c, "d").get<double>();
        comp.u = dec_vector(field(c, "u"));
        comp.x_weight = dec_vector(field(c, "x_weight"));
        m.components.push_back(std::move(comp));
    }
    m.x_residual_norms = field(j, "x_residual_norms").get<std::vector<double>>();
    m.y_residual_norms = field(j, "y_residual_norms").get<std::vector<double>>();
    m.stop = dec_stop(field(j, "stop"));
    return m;
}

UnfoldedPlsModel decode_pls(const json& j) {
    UnfoldedPlsModel m;
    m.x_shape = dec_shape(field(j, "x_shape"));
    m.y_shape = dec_shape(field(j, "y_shape"));
    PlsModel& p = m.pls;
    p.w = dec_matrix(field(j, "w"));
    p.t = dec_matrix(field(j, "t"));
    p.p = dec_matrix(field(j, "p"));
    p.q = dec_matrix(field(j, "q"));
    p.u = dec_matrix(field(j, "u"));
    p.d = dec_vector(field(j, "d"));
    p.center = field(j, "center").get<bool>();
    p.x_mean = dec_vector(field(j, "x_mean"));
    p.y_mean = dec_vector(field(j, "y_mean"));
    p.x_residual_norms = field(j, "x_residual_norms").get<std::vector<double>>();
    p.y_residual_norms = field(j, "y_residual_norms").get<std::vector<double>>();
    p.inner_iterations = field(j, "inner_iterations").get<std::vector<int>>();
    return m;
}

void check_consistency(const AnyModel& model) {
    const std::size_t rank = model_rank(model);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UnfoldedPlsModel>) {
                const auto& p = m.pls;
                const auto px = static_cast<Eigen::Index>(m.x_shape.numel() / m.x_shape[0]);
                const auto py = static_cast<Eigen::Index>(m.y_shape.numel() / m.y_shape[0]);
                if (p.w.rows() != px || p.p.rows() != px || p.q.rows() != py || p.x_mean.size() != px ||
                    p.y_mean.size() != py || p.w.cols() != static_cast<Eigen::Index>(rank) ||
                    p.p.cols() != p.w.cols() || p.q.cols() != p.w.cols()) {
                    throw FormatError("model file: PLS blocks do not match the stored shapes");
                }
            } else {
                const std::size_t x_modes = m.x_shape.order() - 1;
                for (const auto& c : m.components) {
                    if (c.p.size() != x_modes) throw FormatError("model file: loading count does not match X order");
                    for (std::size_t n = 0; n < x_modes; ++n) {
                        if (static_cast<std::size_t>(c.p[n].rows()) != m.x_shape[n + 1]) {
                            throw FormatError("model file: loading size does not match X shape");
                        }
                    }
                    if (static_cast<std::size_t>(c.x_weight.size()) != c.g.numel()) {
                        throw FormatError("model file: x_weight does not match core size");
                    }
                }
            }
        },
        model);
}

}  // namespace

std::string model_checksum(const AnyModel& model) { return fnv1a64(encode_payload(model).dump()); }

std::string encode_model(const AnyModel& model, std::string_view fitted_as) {
    const json payload = encode_payload(model);
    const std::string tag(tag_of(model));
    json doc = {{"format", kFormatName},
                {"version", kModelFormatVersion},
                {"algorithm", tag},
                {"fitted_as", fitted_as.empty() ? tag : std::string(fitted_as)},
                {"payload", payload},
                {"checksum", fnv1a64(payload.dump())}};
    return doc.dump(1) + "\n";
}

LoadedModel decode_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("model file: invalid JSON: ") + e.what());
    }
    try {
        if (field(doc, "format").get<std::string>() != kFormatName) throw FormatError("model file: wrong format tag");
        const int version = field(doc, "version").get<int>();
        if (version != kModelFormatVersion) {
            throw FormatError("model file: unsupported version " + std::to_string(version));
        }
        const json& payload = field(doc, "payload");
        const std::string stored = field(doc, "checksum").get<std::string>();
        const std::string actual = fnv1a64(payload.dump());
        if (stored != actual) throw FormatError("model file: checksum mismatch (stored " + stored + ", actual " + actual + ")");

        const std::string algo = field(doc, "algorithm").get<std::string>();
        LoadedModel out{HoplsModel{}, {}, actual};
        if (algo == "hopls") {
            out.model = decode_hopls(payload);
        } else if (algo == "hopls2") {
            out.model = decode_hopls2(payload);
        } else if (algo == "pls") {
            out.model = decode_pls(payload);
        } else {
            throw FormatError("model file: unknown algorithm '" + algo + "'");
        }
        out.fitted_as = doc.contains("fitted_as") ? doc.at("fitted_as").get<std::string>() : algo;
        check_consistency(out.model);
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file: ") + e.what());
    } catch (const DimensionError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    } catch (const NumericalError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const AnyModel& model, std::string_view fitted_as) {
    write_file_bytes(path, encode_model(model, fitted_as));
}

LoadedModel load_model(const std::filesystem::path& path) {
    try {
        return decode_model(read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace hopls
