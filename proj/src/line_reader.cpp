#include "line_reader.hpp"

#include <crudecast/error.hpp>

#include <zlib.h>

#include <array>

namespace crudecast::detail {

namespace {
constexpr std::size_t kChunk = 1 << 16;
}

class LineReader::Inflater {
public:
    Inflater() {
        if (inflateInit2(&zs_, 15 + 16) != Z_OK) throw Error(ErrorCode::Io, "zlib initialisation failed");
    }
    ~Inflater() { inflateEnd(&zs_); }

    // Appends decompressed bytes to out; false once input and stream are done.
    bool read(std::istream& in, std::string& out) {
        while (true) {
            if (zs_.avail_in == 0 && !in_eof_) {
                in.read(input_.data(), static_cast<std::streamsize>(input_.size()));
                zs_.next_in = reinterpret_cast<Bytef*>(input_.data());
                zs_.avail_in = static_cast<uInt>(in.gcount());
                if (zs_.avail_in == 0) in_eof_ = true;
            }
            if (zs_.avail_in == 0 && in_eof_) {
                if (!member_done_) throw Error(ErrorCode::Io, "truncated gzip stream");
                return false;
            }
            std::array<char, kChunk> output{};
            zs_.next_out = reinterpret_cast<Bytef*>(output.data());
            zs_.avail_out = static_cast<uInt>(output.size());
            const int rc = inflate(&zs_, Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                member_done_ = true;
                inflateReset(&zs_); // concatenated members
            } else if (rc == Z_OK || rc == Z_BUF_ERROR) {
                member_done_ = false;
            } else {
                throw Error(ErrorCode::Io, "corrupt gzip stream");
            }
            const std::size_t produced = output.size() - zs_.avail_out;
            if (produced > 0) {
                out.append(output.data(), produced);
                return true;
            }
        }
    }

private:
    z_stream zs_{};
    std::array<char, kChunk> input_{};
    bool in_eof_ = false;
    bool member_done_ = false;
};

LineReader::LineReader(std::istream& in) : in_(in) {
    const int b0 = in_.peek();
    if (b0 == 0x1f) {
        in_.get();
        const int b1 = in_.peek();
        in_.unget();
        if (b1 == 0x8b) inflater_ = std::make_unique<Inflater>();
    }
}

LineReader::~LineReader() = default;

bool LineReader::compressed() const noexcept { return inflater_ != nullptr; }

bool LineReader::fill() {
    if (eof_) return false;
    buffer_.erase(0, pos_);
    pos_ = 0;
    if (inflater_) {
        if (!inflater_->read(in_, buffer_)) eof_ = true;
    } else {
        std::array<char, kChunk> chunk{};
        in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got == 0) eof_ = true;
        buffer_.append(chunk.data(), got);
    }
    return !eof_;
}

bool LineReader::next(std::string& line) {
    while (true) {
        const auto nl = buffer_.find('\n', pos_);
        if (nl != std::string::npos) {
            line.assign(buffer_, pos_, nl - pos_);
            pos_ = nl + 1;
            break;
        }
        if (!fill()) {
            if (pos_ >= buffer_.size()) return false;
            line.assign(buffer_, pos_, std::string::npos);
            pos_ = buffer_.size();
            break;
        }
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
}

} // namespace crudecast::detail
