#include "lcarand/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lcarand/errors.hpp"

namespace lcarand {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double number(const std::string& tok, std::size_t pos) {
    std::string t = trim(tok);
    try {
        std::size_t slash = t.find('/');
        std::size_t used = 0;
        if (slash != std::string::npos) {
            double a = std::stod(t.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument("");
            std::string den = t.substr(slash + 1);
            double b = std::stod(den, &used);
            if (used != den.size() || b == 0) throw std::invalid_argument("");
            return a / b;
        }
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + t + "'", pos);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

struct Entry {
    std::string value;
    std::size_t pos;
};

Eigen::MatrixXd matrix(const Entry& e) {
    auto rows = split(e.value, ';');
    Eigen::MatrixXd M;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto cols = split(rows[i], ',');
        if (i == 0) M.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        if (static_cast<Eigen::Index>(cols.size()) != M.cols()) throw ParseError("ragged matrix row", e.pos);
        for (std::size_t j = 0; j < cols.size(); ++j) M(i, j) = number(cols[j], e.pos);
    }
    return M;
}

std::vector<double> vec(const Entry& e) {
    std::vector<double> v;
    for (const auto& t : split(e.value, ',')) v.push_back(number(t, e.pos));
    return v;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string fmt_matrix(const Eigen::MatrixXd& M) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        if (i) os << ';';
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << fmt(M(i, j));
    }
    return os.str();
}

}  // namespace

MeasureModel parse_model(const std::string& text) {
    std::string section;
    std::size_t section_pos = 0;
    std::map<std::string, Entry> kv;
    std::size_t pos = 0;
    for (const auto& raw : split(text, '\n')) {
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (!line.empty()) {
            if (line.front() == '[') {
                if (!section.empty()) throw ParseError("only one section per model file", pos);
                if (line.back() != ']') throw ParseError("unterminated section header", pos);
                section = trim(line.substr(1, line.size() - 2));
                section_pos = pos;
            } else {
                auto eq = line.find('=');
                if (eq == std::string::npos) throw ParseError("expected key=value", pos);
                if (section.empty()) throw ParseError("key outside a section", pos);
                std::string key = trim(line.substr(0, eq));
                if (!kv.emplace(key, Entry{trim(line.substr(eq + 1)), pos}).second)
                    throw ParseError("duplicate key '" + key + "'", pos);
            }
        }
        pos += raw.size() + 1;
    }
    static const std::map<std::string, std::vector<std::string>> known{
        {"bernoulli", {"p", "s", "weights"}},
        {"markov", {"p", "s", "Q", "pi"}},
        {"quasi", {"p", "s", "hidden_states", "hidden_Q", "left", "right", "psi"}},
        {"irdi", {"alpha", "nmax"}}};
    if (auto sec = known.find(section); sec != known.end())
        for (const auto& [k, e] : kv)
            if (std::find(sec->second.begin(), sec->second.end(), k) == sec->second.end())
                throw ParseError("unknown key '" + k + "' in [" + section + "]", e.pos);
    auto get = [&](const std::string& k) -> const Entry& {
        auto it = kv.find(k);
        if (it == kv.end()) throw ParseError("missing key '" + k + "' in [" + section + "]", section_pos);
        return it->second;
    };
    auto integer = [&](const std::string& k, long dflt) -> long {
        auto it = kv.find(k);
        if (it == kv.end()) {
            if (dflt < 0) get(k);
            return dflt;
        }
        double v = number(it->second.value, it->second.pos);
        if (v != static_cast<double>(static_cast<long>(v)) || v < 0)
            throw ParseError("'" + k + "' must be a non-negative integer", it->second.pos);
        return static_cast<long>(v);
    };
    MeasureModel m;
    if (section == "bernoulli") {
        m = BernoulliMeasure{static_cast<u64>(integer("p", 2)), static_cast<unsigned>(integer("s", 1)), vec(get("weights"))};
    } else if (section == "markov") {
        u64 p = static_cast<u64>(integer("p", 2));
        unsigned s = static_cast<unsigned>(integer("s", 1));
        std::optional<std::vector<double>> pi;
        if (kv.count("pi")) pi = vec(kv["pi"]);
        m = MarkovMeasure{p, s, make_chain(matrix(get("Q")), pi)};
    } else if (section == "quasi") {
        QuasiMarkovMeasure q;
        q.p = static_cast<u64>(integer("p", 2));
        q.s = static_cast<unsigned>(integer("s", 1));
        Eigen::MatrixXd H = matrix(get("hidden_Q"));
        if (kv.count("hidden_states") && integer("hidden_states", 0) != H.rows())
            throw ParseError("hidden_states disagrees with hidden_Q", kv["hidden_states"].pos);
        q.hidden = make_chain(H);
        q.left = static_cast<unsigned>(integer("left", 0));
        q.right = static_cast<unsigned>(integer("right", 0));
        for (double x : vec(get("psi"))) {
            if (x < 0 || x != static_cast<double>(static_cast<long>(x))) throw ParseError("psi entries are symbol indices", get("psi").pos);
            q.psi.push_back(static_cast<std::uint32_t>(x));
        }
        m = q;
    } else if (section == "irdi") {
        m = IrdiMeasure{number(get("alpha").value, get("alpha").pos), static_cast<unsigned>(integer("nmax", 24))};
    } else {
        throw ParseError("unknown section [" + section + "]", section_pos);
    }
    validate(m);
    return m;
}

MeasureModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const MeasureModel& m) {
    std::ostringstream os;
    std::visit([&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BernoulliMeasure>) {
            os << "[bernoulli]\np=" << x.p << "\ns=" << x.s << "\nweights=";
            for (std::size_t i = 0; i < x.weights.size(); ++i) os << (i ? "," : "") << fmt(x.weights[i]);
            os << "\n";
        } else if constexpr (std::is_same_v<T, MarkovMeasure>) {
            os << "[markov]\np=" << x.p << "\ns=" << x.s << "\nQ=" << fmt_matrix(x.chain.Q) << "\n";
        } else if constexpr (std::is_same_v<T, QuasiMarkovMeasure>) {
            os << "[quasi]\np=" << x.p << "\ns=" << x.s << "\nhidden_states=" << x.hidden.size()
               << "\nhidden_Q=" << fmt_matrix(x.hidden.Q) << "\nleft=" << x.left << "\nright=" << x.right << "\npsi=";
            for (std::size_t i = 0; i < x.psi.size(); ++i) os << (i ? "," : "") << x.psi[i];
            os << "\n";
        } else {
            os << "[irdi]\nalpha=" << fmt(x.alpha) << "\nnmax=" << x.nmax << "\n";
        }
    }, m);
    return os.str();
}

std::vector<std::string> preset_names() { return {"even-shift", "bernoulli", "zero", "mrf-demo", "irdi"}; }

MeasureModel preset(const std::string& name, u64 p) {
    if (name == "even-shift") return even_shift();
    if (name == "bernoulli") return bernoulli_uniform(p);
    if (name == "zero") return point_mass_zero(p);
    if (name == "mrf-demo") return mrf_demo_chain();
    if (name == "irdi") return IrdiMeasure{0.8, 24};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace lcarand
