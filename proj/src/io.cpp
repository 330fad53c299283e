// io.cpp

#include "opk/io.hpp"

#include "opk/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace opk::io {

namespace {

template <class F>
auto parsing(const char* what, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string(what) + ": " + e.what());
    }
}

std::size_t read_dim(const json& j) {
    const auto d = j.at("dim").get<std::int64_t>();
    if (d <= 0) throw Error(ErrorKind::Parse, "dim must be positive");
    return static_cast<std::size_t>(d);
}

void expect_square(const ComplexMatrix& m, std::size_t d, const char* what) {
    const auto n = static_cast<Eigen::Index>(d);
    if (m.rows() != n || m.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not " + std::to_string(d) + "x" +
                                                      std::to_string(d));
}

bool is_flat(const json& j) {
    if (!j.is_array()) return !j.is_object();
    for (const auto& e : j) {
        if (e.is_object()) return false;
        if (e.is_array())
            for (const auto& x : e)
                if (x.is_array() || x.is_object()) return false;
    }
    return true;
}

void dump_into(std::ostringstream& out, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::number_float:
        out << format_double(j.get<double>());
        return;
    case json::value_t::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        if (is_flat(j)) {
            out << '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) out << ", ";
                dump_into(out, j[k], indent, depth + 1);
            }
            out << ']';
            return;
        }
        out << "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            out << pad;
            dump_into(out, j[k], indent, depth + 1);
            out << (k + 1 < j.size() ? ",\n" : "\n");
        }
        out << close_pad << ']';
        return;
    }
    case json::value_t::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        std::size_t k = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++k) {
            out << pad << json(it.key()).dump() << ": ";
            dump_into(out, it.value(), indent, depth + 1);
            out << (k + 1 < j.size() ? ",\n" : "\n");
        }
        out << close_pad << '}';
        return;
    }
    default:
        out << j.dump();
        return;
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

} // namespace

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(to_json(m(i, j)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json to_json(const OperatorKernel& k) {
    json blocks = json::array();
    for (std::size_t i = 0; i < k.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < k.size(); ++j) row.push_back(to_json(k.block(i, j)));
        blocks.push_back(std::move(row));
    }
    return {{"dim", k.dim()}, {"labels", k.labels()}, {"blocks", std::move(blocks)}};
}

json to_json(const POVM& q) {
    json effects = json::array();
    for (const auto& e : q.effects()) effects.push_back(to_json(e));
    return {{"dim", q.dim()}, {"effects", std::move(effects)}};
}

json to_json(const DensityMatrix& rho) { return {{"dim", rho.dim()}, {"matrix", to_json(rho.matrix())}}; }

json to_json(const CPMap& phi) {
    json kraus = json::array();
    for (const auto& r : phi.kraus()) kraus.push_back(to_json(r));
    return {{"dim", phi.dim()}, {"kraus", std::move(kraus)}, {"unital", phi.unital()}};
}

json to_json(const TomographyProblem& problem) {
    json pairs = json::array();
    for (const auto& [i, j] : problem.pairs()) pairs.push_back(json::array({i, j}));
    json data = json::array();
    for (const auto& c : problem.data()) data.push_back(to_json(c));
    return {{"kernel", to_json(problem.kernel())}, {"pairs", std::move(pairs)}, {"data", std::move(data)}};
}

Complex complex_from_json(const json& j) {
    return parsing("complex", [&] {
        if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Parse, "complex must be [re, im]");
        return Complex(j.at(0).get<double>(), j.at(1).get<double>());
    });
}

ComplexMatrix matrix_from_json(const json& j) {
    return parsing("matrix", [&] {
        const auto rows = j.at("rows").get<std::int64_t>();
        const auto cols = j.at("cols").get<std::int64_t>();
        const json& data = j.at("data");
        if (rows < 0 || cols < 0) throw Error(ErrorKind::Parse, "matrix: negative shape");
        if (!data.is_array() || static_cast<std::int64_t>(data.size()) != rows * cols)
            throw Error(ErrorKind::DimensionMismatch, "matrix: data length differs from rows*cols");
        ComplexMatrix m(rows, cols);
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(data[k++]);
        return m;
    });
}

OperatorKernel kernel_from_json(const json& j) {
    return parsing("kernel", [&] {
        const std::size_t d = read_dim(j);
        auto labels = j.at("labels").get<std::vector<std::string>>();
        const json& rows = j.at("blocks");
        if (!rows.is_array() || rows.size() != labels.size())
            throw Error(ErrorKind::DimensionMismatch, "kernel: blocks must be an m x m table");
        std::vector<ComplexMatrix> blocks;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != labels.size())
                throw Error(ErrorKind::DimensionMismatch, "kernel: blocks must be an m x m table");
            for (const auto& b : row) {
                blocks.push_back(matrix_from_json(b));
                expect_square(blocks.back(), d, "kernel block");
            }
        }
        return OperatorKernel(d, std::move(labels), std::move(blocks));
    });
}

POVM povm_from_json(const json& j) {
    return parsing("povm", [&] {
        const std::size_t d = read_dim(j);
        std::vector<ComplexMatrix> effects;
        for (const auto& e : j.at("effects")) {
            effects.push_back(matrix_from_json(e));
            expect_square(effects.back(), d, "effect");
        }
        return POVM(std::move(effects));
    });
}

DensityMatrix state_from_json(const json& j) {
    return parsing("state", [&] {
        const std::size_t d = read_dim(j);
        ComplexMatrix m = matrix_from_json(j.at("matrix"));
        expect_square(m, d, "state matrix");
        return DensityMatrix(std::move(m));
    });
}

CPMap cpmap_from_json(const json& j) {
    return parsing("cpmap", [&] {
        const std::size_t n = read_dim(j);
        std::vector<ComplexMatrix> kraus;
        for (const auto& r : j.at("kraus")) {
            kraus.push_back(matrix_from_json(r));
            expect_square(kraus.back(), n, "Kraus operator");
        }
        return CPMap(std::move(kraus), j.value("unital", false));
    });
}

TomographyProblem problem_from_json(const json& j) {
    return parsing("problem", [&] {
        OperatorKernel kernel = kernel_from_json(j.at("kernel"));
        std::vector<TomographyProblem::Pair> pairs;
        for (const auto& p : j.at("pairs")) {
            if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::Parse, "pair must be [i, j]");
            const auto a = p.at(0).get<std::int64_t>();
            const auto b = p.at(1).get<std::int64_t>();
            if (a < 0 || b < 0) throw Error(ErrorKind::DimensionMismatch, "pair index is negative");
            pairs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
        std::vector<Complex> data;
        for (const auto& c : j.at("data")) data.push_back(complex_from_json(c));
        return TomographyProblem(std::move(kernel), std::move(pairs), std::move(data));
    });
}

std::string dump(const json& j, int indent) {
    std::ostringstream out;
    dump_into(out, j, indent, 0);
    out << '\n';
    return out.str();
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

std::string batch_to_csv(const SampleBatch& batch) {
    std::ostringstream out;
    out << "label";
    for (std::size_t k = 0; k < batch.dim; ++k) out << ",re_" << k << ",im_" << k;
    out << '\n';
    for (std::size_t n = 0; n < batch.count; ++n) {
        for (std::size_t i = 0; i < batch.samples.size(); ++i) {
            out << csv_field(batch.labels[i]);
            for (std::size_t k = 0; k < batch.dim; ++k) {
                const Complex z = batch.samples[i](static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
                out << ',' << format_double(z.real()) << ',' << format_double(z.imag());
            }
            out << '\n';
        }
    }
    return out.str();
}

} // namespace opk::io
