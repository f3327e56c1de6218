#include "fcat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fcat {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::out_of_range("CSV has no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    const std::string& s = rows.at(row).at(column(name));
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("CSV cell '" + s + "' in column " + name + " is not a number");
    return v;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t columns = 0;
    std::size_t filled = 0;
    std::string path;
};

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_q) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_q = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_q = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->path = path;
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("cannot write " + path);
    }
    impl_->columns = header.size();
    impl_->out << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) impl_->out << (i ? "," : "") << quote(header[i]);
    impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (impl_->filled == impl_->columns) throw std::logic_error("too many cells in CSV row of " + impl_->path);
    impl_->out << (impl_->filled ? "," : "") << quote(v);
    ++impl_->filled;
    return *this;
}

void CsvWriter::end_row() {
    if (impl_->filled != impl_->columns) throw std::logic_error("incomplete CSV row in " + impl_->path);
    impl_->out << "\n";
    impl_->filled = 0;
    if (!impl_->out) throw std::runtime_error("write failed for " + impl_->path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# config_hash=";
            if (line.rfind(key, 0) == 0) t.config_hash = line.substr(key.size());
            continue;
        }
        auto cells = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw std::runtime_error(path + ": row with " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw std::runtime_error(path + ": missing header row");
    return t;
}

void write_wigner_csv(const std::string& path, const WignerGrid& g, const std::string& config_hash) {
    CsvWriter w(path, config_hash, {"re", "im", "w"});
    for (std::size_t r = 0; r < g.im_axis.size(); ++r)
        for (std::size_t c = 0; c < g.re_axis.size(); ++c) {
            w.cell(g.re_axis[c]).cell(g.im_axis[r]).cell(g.values(Eigen::Index(r), Eigen::Index(c)));
            w.end_row();
        }
}

WignerGrid read_wigner_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header != std::vector<std::string>{"re", "im", "w"}) throw std::runtime_error(path + ": not a Wigner grid CSV");
    WignerGrid g;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double re = t.number(i, "re"), im = t.number(i, "im");
        if (g.im_axis.empty() || g.im_axis.back() != im) g.im_axis.push_back(im);
        if (g.im_axis.size() == 1) g.re_axis.push_back(re);
    }
    const std::size_t nr = g.re_axis.size(), ni = g.im_axis.size();
    if (nr * ni != t.rows.size()) throw std::runtime_error(path + ": grid is not rectangular");
    g.values.resize(Eigen::Index(ni), Eigen::Index(nr));
    for (std::size_t i = 0; i < t.rows.size(); ++i) g.values(Eigen::Index(i / nr), Eigen::Index(i % nr)) = t.number(i, "w");
    g.step_re = nr > 1 ? g.re_axis[1] - g.re_axis[0] : 0.0;
    g.step_im = ni > 1 ? g.im_axis[1] - g.im_axis[0] : 0.0;
    return g;
}

void write_fock_csv(const std::string& path, const QuantumState& state, const std::string& config_hash) {
    VectorXcd v;
    Eigen::VectorXd pop;
    if (state.is_pure()) {
        v = state.vector();
        pop = v.cwiseAbs2();
    } else {
        const MatrixXcd& rho = state.density();
        pop = rho.diagonal().real();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
        v = es.eigenvectors().col(rho.rows() - 1);
        // fix the global phase so the largest component is real and positive
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::polar(1.0, -std::arg(v(k)));
    }
    CsvWriter w(path, config_hash, {"n", "population", "re", "im"});
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        w.cell(long(n)).cell(pop(n)).cell(v(n).real()).cell(v(n).imag());
        w.end_row();
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return nlohmann::json::parse(in);
}

} // namespace fcat
