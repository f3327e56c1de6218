#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fcat/measures.hpp"

namespace fcat {

// Every CSV starts with "# config_hash=<hex>" and then a header row.
struct CsvTable {
    std::string config_hash;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    CsvWriter& cell(double v);
    CsvWriter& cell(long v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    struct Impl;
    Impl* impl_;
};

CsvTable read_csv(const std::string& path);

// Row-major with the imaginary axis outer: columns re, im, w.
void write_wigner_csv(const std::string& path, const WignerGrid& grid, const std::string& config_hash);
WignerGrid read_wigner_csv(const std::string& path);

// Columns n, population, re, im. For mixed states re/im hold the dominant eigenvector.
void write_fock_csv(const std::string& path, const QuantumState& state, const std::string& config_hash);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// shortest decimal text that round-trips the double
std::string format_double(double v);

} // namespace fcat
