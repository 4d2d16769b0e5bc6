#include "hjb/problem_config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "hjb/error.hpp"
#include "hjb/expression.hpp"

namespace hjb {

namespace {

struct Entry {
    std::string value;
    int line;
};

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

bool allowed_key(const std::string& key) {
    static const char* fixed[] = {"name",  "dim",   "noise", "x_min", "x_max", "y_min",     "y_max",
                                  "a_min", "a_max", "c",     "f",     "exact", "dirichlet"};
    for (const char* k : fixed) {
        if (key == k) return true;
    }
    if (key.size() == 3 && key[0] == 'b' && key[1] == '_') return key[2] >= '1' && key[2] <= '2';
    if (key.size() == 8 && key.compare(0, 6, "sigma_") == 0) {
        return key[6] >= '1' && key[6] <= '2' && key[7] >= '1' && key[7] <= '9';
    }
    return false;
}

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::shared_ptr<const Expression> expression(const std::string& key) const {
        const Entry& e = require(key);
        try {
            return std::make_shared<const Expression>(Expression::parse(e.value));
        } catch (const Error& err) {
            fail(e.line, key + ": " + err.what());
        }
    }

    double number(const std::string& key) const {
        const auto expr = expression(key);
        return (*expr)(0.0, 0.0, 0.0);
    }

    int integer(const std::string& key) const {
        const double v = number(key);
        if (v != static_cast<double>(static_cast<int>(v))) fail(require(key).line, key + " must be an integer");
        return static_cast<int>(v);
    }

    const Entry& require(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw Error(ErrorCode::parse_error, "missing key '" + key + "'");
        return it->second;
    }

    int line(const std::string& key) const { return require(key).line; }

private:
    std::map<std::string, Entry> entries_;
};

using ExprPtr = std::shared_ptr<const Expression>;

double eval(const Expression& e, double a, std::span<const double> x) {
    return e(x[0], x.size() > 1 ? x[1] : 0.0, a);
}

}  // namespace

ControlProblem parse_problem_config(std::string_view text, const std::string& default_name) {
    std::map<std::string, Entry> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = expression'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!allowed_key(key)) fail(line_no, "unknown key '" + key + "'");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        if (!entries.emplace(key, Entry{value, line_no}).second) fail(line_no, "duplicate key '" + key + "'");
    }

    const Reader reader(std::move(entries));
    ControlProblem p;
    p.name = reader.has("name") ? reader.require("name").value : default_name;

    const int dim = reader.integer("dim");
    if (dim != 1 && dim != 2) fail(reader.line("dim"), "dim must be 1 or 2");
    const int noise = reader.integer("noise");
    if (noise < 1 || noise > 9) fail(reader.line("noise"), "noise must be in 1..9");
    p.dim = static_cast<std::size_t>(dim);
    p.noise_dim = static_cast<std::size_t>(noise);

    p.domain.lower.push_back(reader.number("x_min"));
    p.domain.upper.push_back(reader.number("x_max"));
    if (dim == 2) {
        p.domain.lower.push_back(reader.number("y_min"));
        p.domain.upper.push_back(reader.number("y_max"));
    } else if (reader.has("y_min") || reader.has("y_max")) {
        fail(reader.line(reader.has("y_min") ? "y_min" : "y_max"), "y bounds given for a 1D problem");
    }
    p.controls = {reader.number("a_min"), reader.number("a_max")};

    std::vector<ExprPtr> sigma(p.dim * p.noise_dim);
    for (std::size_t i = 0; i < p.dim; ++i) {
        for (std::size_t k = 0; k < p.noise_dim; ++k) {
            const std::string key = "sigma_" + std::to_string(i + 1) + std::to_string(k + 1);
            if (reader.has(key)) sigma[i * p.noise_dim + k] = reader.expression(key);
        }
    }
    for (int i = 1; i <= 2; ++i) {
        for (int k = 1; k <= 9; ++k) {
            const std::string key = "sigma_" + std::to_string(i) + std::to_string(k);
            if (reader.has(key) && (i > dim || k > noise)) fail(reader.line(key), key + " outside the sigma shape");
        }
    }
    std::vector<ExprPtr> drift(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) {
        const std::string key = "b_" + std::to_string(i + 1);
        if (reader.has(key)) drift[i] = reader.expression(key);
    }
    if (dim == 1 && reader.has("b_2")) fail(reader.line("b_2"), "b_2 given for a 1D problem");

    p.sigma = [sigma](double a, std::span<const double> x, std::span<double> out) {
        for (std::size_t e = 0; e < sigma.size(); ++e) out[e] = sigma[e] ? eval(*sigma[e], a, x) : 0.0;
    };
    p.b = [drift](double a, std::span<const double> x, std::span<double> out) {
        for (std::size_t e = 0; e < drift.size(); ++e) out[e] = drift[e] ? eval(*drift[e], a, x) : 0.0;
    };
    const ExprPtr c = reader.expression("c");
    const ExprPtr f = reader.expression("f");
    const ExprPtr dirichlet = reader.expression("dirichlet");
    p.c = [c](double a, std::span<const double> x) { return eval(*c, a, x); };
    p.f = [f](double a, std::span<const double> x) { return eval(*f, a, x); };
    p.dirichlet = [dirichlet](std::span<const double> x) { return eval(*dirichlet, 0.0, x); };
    if (reader.has("exact")) {
        const ExprPtr exact = reader.expression("exact");
        p.exact = [exact](std::span<const double> x) { return eval(*exact, 0.0, x); };
    }

    finalize_problem(p);
    return p;
}

ControlProblem load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse_error, "cannot open problem config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_problem_config(text.str(), std::filesystem::path(path).stem().string());
}

}  // namespace hjb
