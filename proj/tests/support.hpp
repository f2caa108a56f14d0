#ifndef CRUDECAST_TESTS_SUPPORT_HPP
#define CRUDECAST_TESTS_SUPPORT_HPP

#include <crudecast/error.hpp>
#include <crudecast/series.hpp>

#include <algorithm>
#include <optional>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;
using namespace std::chrono;

inline fs::path fixture(const std::string& rel) { return fs::path(CRUDECAST_TEST_DATA) / rel; }
inline fs::path source_dir() { return fs::path(CRUDECAST_SOURCE_DIR); }

inline crudecast::Date ymd(int y, unsigned m, unsigned d) { return crudecast::Date{year{y} / month{m} / day{d}}; }

inline crudecast::DailySeries make_series(std::vector<double> v, crudecast::Date start = ymd(2014, 1, 6),
                                          std::string name = "s") {
    return crudecast::DailySeries(std::move(name), crudecast::default_calendar(), start, std::move(v));
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Temporary directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("crudecast_" + tag + "_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Canonical two-column form of parser output, sorted by date.
inline std::string observations_csv(crudecast::RawObservations raw) {
    std::sort(raw.entries.begin(), raw.entries.end());
    std::string out = "date,value\n";
    for (const auto& [d, v] : raw.entries) out += crudecast::format_date(d) + "," + crudecast::format_number(v) + "\n";
    return out;
}

// Error code raised by fn, or nullopt when it returns normally.
template <class F>
std::optional<crudecast::ErrorCode> code_of(F&& fn) {
    try {
        fn();
    } catch (const crudecast::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> out(n);
    for (auto& x : out) x = dist(rng);
    return out;
}

} // namespace testsupport

#endif
