#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "credcal/io.hpp"

namespace credcal {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank, non-comment line; false at end of input.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    }

    std::size_t number() const { return number_; }

    [[noreturn]] void fail(ErrorKind kind, const std::string& what, std::size_t column = 0) const {
        std::string where = "line " + std::to_string(number_);
        if (column > 0) where += ", column " + std::to_string(column);
        throw Error(kind, where + ": " + what);
    }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

struct Token {
    std::string_view text;
    std::size_t column;
};

std::vector<Token> split(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == ',')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != ',') ++i;
        if (i > start) tokens.push_back({std::string_view(line).substr(start, i - start), start + 1});
    }
    return tokens;
}

template <typename T>
T parse_number(const LineReader& reader, const Token& tok) {
    T value{};
    const auto* end = tok.text.data() + tok.text.size();
    const auto [ptr, ec] = std::from_chars(tok.text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        reader.fail(ErrorKind::ParseError, "cannot parse '" + std::string(tok.text) + "' as a number", tok.column);
    }
    return value;
}

}  // namespace

LabeledDataset read_dataset(std::istream& in) {
    LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw Error(ErrorKind::ParseError, "empty dataset file");

    long k = -1, m = -1, n = -1;
    for (const auto& tok : split(line)) {
        const auto eq = tok.text.find('=');
        if (eq == std::string_view::npos) reader.fail(ErrorKind::ParseError, "expected header 'K=.. M=.. N=..'", tok.column);
        const auto key = tok.text.substr(0, eq);
        const Token value{tok.text.substr(eq + 1), tok.column + eq + 1};
        const long v = parse_number<long>(reader, value);
        if (key == "K") {
            k = v;
        } else if (key == "M") {
            m = v;
        } else if (key == "N") {
            n = v;
        } else {
            reader.fail(ErrorKind::ParseError, "unknown header field '" + std::string(key) + "'", tok.column);
        }
    }
    if (k < 2 || m < 1 || n < 1) reader.fail(ErrorKind::ParseError, "header needs K >= 2, M >= 1, N >= 1");

    const auto kk = static_cast<std::size_t>(k);
    const auto nn = static_cast<std::size_t>(n);
    std::vector<PredictionSet> members;
    members.reserve(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) {
        std::vector<double> probs;
        probs.reserve(nn * kk);
        for (std::size_t i = 0; i < nn; ++i) {
            if (!reader.next(line)) {
                throw Error(ErrorKind::ParseError, "unexpected end of file in member " + std::to_string(j + 1) + " at row " +
                                                       std::to_string(i + 1));
            }
            const auto tokens = split(line);
            if (tokens.size() != kk) {
                reader.fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(kk) + " values, found " + std::to_string(tokens.size()));
            }
            double sum = 0.0;
            const std::size_t begin = probs.size();
            for (const auto& tok : tokens) {
                const double v = parse_number<double>(reader, tok);
                if (!(v >= 0.0) || !std::isfinite(v)) reader.fail(ErrorKind::NonSimplexRow, "negative or non-finite probability", tok.column);
                sum += v;
                probs.push_back(v);
            }
            if (!(std::abs(sum - 1.0) <= kInputSimplexTol)) {
                reader.fail(ErrorKind::NonSimplexRow, "member " + std::to_string(j + 1) + " row " + std::to_string(i + 1) +
                                                          " sums to " + format_double(sum));
            }
            if (std::abs(sum - 1.0) > kRenormalizeTol) {
                for (std::size_t c = begin; c < probs.size(); ++c) probs[c] /= sum;
            }
        }
        members.emplace_back(nn, kk, std::move(probs));
    }

    std::vector<int> labels;
    labels.reserve(nn);
    while (labels.size() < nn && reader.next(line)) {
        for (const auto& tok : split(line)) {
            const int y = parse_number<int>(reader, tok);
            if (y < 1 || y > k) reader.fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(y) + " outside 1.." + std::to_string(k), tok.column);
            labels.push_back(y - 1);
        }
    }
    if (labels.size() != nn) {
        throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(nn) + " labels, found " + std::to_string(labels.size()));
    }
    if (reader.next(line)) reader.fail(ErrorKind::ParseError, "trailing content after the label line");
    return LabeledDataset(ClassifierSet(std::move(members)), std::move(labels));
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
    return read_dataset(in);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
    const auto& set = data.set();
    out << "K=" << set.k() << " M=" << set.m() << " N=" << set.n() << '\n';
    for (std::size_t j = 0; j < set.m(); ++j) {
        out << "# member " << (j + 1) << '\n';
        const auto& member = set.member(j);
        for (std::size_t i = 0; i < set.n(); ++i) {
            const auto row = member.row(i);
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c > 0) out << ' ';
                out << format_double(row[c]);
            }
            out << '\n';
        }
    }
    out << "# labels\n";
    const auto labels = data.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out << ' ';
        out << (labels[i] + 1);
    }
    out << '\n';
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& data) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    write_dataset(out, data);
}

}  // namespace credcal
