#include "csc/io.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace csc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'C', '1'};

void put_u64(std::ostream &out, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
    out.write(reinterpret_cast<const char *>(b), 8);
}

uint64_t get_u64(std::istream &in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char *>(b), 8);
    if (!in) throw config_error("CSC1: truncated header");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream &out, const std::vector<double> &vals) {
    for (double d : vals) {
        uint64_t bits;
        std::memcpy(&bits, &d, 8);
        put_u64(out, bits);
    }
}

void get_f64(std::istream &in, std::vector<double> &vals) {
    for (double &d : vals) {
        const uint64_t bits = get_u64(in);
        std::memcpy(&d, &bits, 8);
    }
}

void put_header(std::ostream &out, RecordKind kind) {
    out.write(kMagic, 4);
    const char k = char(kind);
    out.write(&k, 1);
}

RecordKind get_header(std::istream &in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw config_error("CSC1: bad magic");
    char k = 0;
    in.read(&k, 1);
    if (!in || k < 1 || k > 3) throw config_error("CSC1: bad record kind");
    return RecordKind(k);
}

void expect_kind(std::istream &in, RecordKind want, const char *what) {
    if (get_header(in) != want)
        throw config_error(std::string("CSC1: expected a ") + what + " record");
}

std::ifstream open_in(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open file: " + path);
    return f;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write file: " + path);
    return f;
}

} // namespace

void write_csc1(std::ostream &out, const Signal &x) {
    put_header(out, RecordKind::signal);
    put_u64(out, uint64_t(x.length()));
    put_u64(out, uint64_t(x.channels()));
    put_f64(out, x.raw());
}

void write_csc1(std::ostream &out, const Dictionary &dict) {
    put_header(out, RecordKind::dictionary);
    put_u64(out, uint64_t(dict.num_atoms()));
    put_u64(out, uint64_t(dict.width()));
    put_u64(out, uint64_t(dict.channels()));
    for (int64_t k = 0; k < dict.num_atoms(); ++k) put_f64(out, dict.atom(k).raw());
}

void write_csc1(std::ostream &out, const SparseCode &code) {
    put_header(out, RecordKind::code);
    put_u64(out, uint64_t(code.num_atoms()));
    put_u64(out, uint64_t(code.length()));
    put_f64(out, code.raw());
}

RecordKind peek_csc1_kind(std::istream &in) {
    const auto pos = in.tellg();
    const RecordKind kind = get_header(in);
    in.seekg(pos);
    return kind;
}

Signal read_csc1_signal(std::istream &in) {
    expect_kind(in, RecordKind::signal, "signal");
    const int64_t T = int64_t(get_u64(in));
    const int64_t P = int64_t(get_u64(in));
    Signal x(T, P);
    get_f64(in, x.raw());
    if (!in) throw config_error("CSC1: truncated signal data");
    return x;
}

Dictionary read_csc1_dictionary(std::istream &in) {
    expect_kind(in, RecordKind::dictionary, "dictionary");
    const int64_t K = int64_t(get_u64(in));
    const int64_t W = int64_t(get_u64(in));
    const int64_t P = int64_t(get_u64(in));
    std::vector<Atom> atoms;
    atoms.reserve(size_t(K));
    for (int64_t k = 0; k < K; ++k) {
        Atom a(W, P);
        get_f64(in, a.raw());
        atoms.push_back(std::move(a));
    }
    if (!in) throw config_error("CSC1: truncated dictionary data");
    return Dictionary(std::move(atoms));
}

SparseCode read_csc1_code(std::istream &in) {
    expect_kind(in, RecordKind::code, "code");
    const int64_t K = int64_t(get_u64(in));
    const int64_t L = int64_t(get_u64(in));
    SparseCode code(K, L);
    get_f64(in, code.raw());
    if (!in) throw config_error("CSC1: truncated code data");
    return code;
}

void save_csc1(const std::string &path, const Signal &x) {
    auto f = open_out(path);
    write_csc1(f, x);
}
void save_csc1(const std::string &path, const Dictionary &dict) {
    auto f = open_out(path);
    write_csc1(f, dict);
}
void save_csc1(const std::string &path, const SparseCode &code) {
    auto f = open_out(path);
    write_csc1(f, code);
}

Signal load_csc1_signal(const std::string &path) {
    auto f = open_in(path);
    return read_csc1_signal(f);
}
Dictionary load_csc1_dictionary(const std::string &path) {
    auto f = open_in(path);
    return read_csc1_dictionary(f);
}
SparseCode load_csc1_code(const std::string &path) {
    auto f = open_in(path);
    return read_csc1_code(f);
}

void write_signal_csv(std::ostream &out, const Signal &x) {
    out << "t";
    for (int64_t p = 0; p < x.channels(); ++p) out << ",ch" << p;
    out << "\n";
    char buf[40];
    for (int64_t t = 0; t < x.length(); ++t) {
        out << t;
        for (int64_t p = 0; p < x.channels(); ++p) {
            std::snprintf(buf, sizeof(buf), "%.17g", x.at(t, p));
            out << ',' << buf;
        }
        out << "\n";
    }
}

Signal read_signal_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw config_error("signal CSV: empty input");
    int64_t P = 0;
    for (char c : line)
        if (c == ',') ++P;
    if (P < 1) throw config_error("signal CSV: header must be t,ch0,...");
    std::vector<double> values;
    int64_t T = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ','); // t index column
        for (int64_t p = 0; p < P; ++p) {
            if (!std::getline(row, cell, ','))
                throw config_error("signal CSV: short row");
            values.push_back(std::stod(cell));
        }
        ++T;
    }
    if (T == 0) throw config_error("signal CSV: no samples");
    Signal x(T, P);
    x.raw() = std::move(values);
    return x;
}

} // namespace csc
