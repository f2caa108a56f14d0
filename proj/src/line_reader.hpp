#ifndef CRUDECAST_SRC_LINE_READER_HPP
#define CRUDECAST_SRC_LINE_READER_HPP

#include <cstddef>
#include <istream>
#include <memory>
#include <string>

namespace crudecast::detail {

// Reads lines from a plain or gzip-compressed stream (detected by the magic
// bytes). Holds one buffer chunk and one line at a time. Trailing '\r' is
// stripped.
class LineReader {
public:
    explicit LineReader(std::istream& in);
    ~LineReader();
    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    bool next(std::string& line);
    /// 1-based number of the line last returned.
    std::size_t line_number() const noexcept { return line_number_; }
    bool compressed() const noexcept;

private:
    class Inflater;

    bool fill();

    std::istream& in_;
    std::unique_ptr<Inflater> inflater_;
    std::string buffer_;
    std::size_t pos_ = 0;
    bool eof_ = false;
    std::size_t line_number_ = 0;
};

} // namespace crudecast::detail

#endif
