#ifndef CRUDECAST_ERROR_HPP
#define CRUDECAST_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crudecast {

// Numeric values are mirrored by cc_status in crudecast.h; keep them in sync.
enum class ErrorCode : int {
    InvalidArgument = 1,
    Io = 2,
    Validation = 3,
    StageFailure = 4,
    // series core
    EmptyAfterAlignment = 10,
    DuplicateDate = 11,
    LagTooLarge = 12,
    LagExceedsLength = 13,
    OrderExceedsLength = 14,
    BoundaryOutOfRange = 15,
    EmptyIntersection = 16,
    CalendarMismatch = 17,
    // text metrics
    OutOfRange = 20,
    EmptyCorpus = 21,
    OverlappingLexicon = 22,
    // statistics
    LengthMismatch = 30,
    ZeroVariance = 31,
    SeriesTooShort = 32,
    SingularRegression = 33,
    // arima
    NonConvergence = 40,
    TooFewObservations = 41,
    ExogMissing = 42,
    NonStationaryParams = 43,
    MissingFutureExog = 44,
    CollinearRegressors = 45,
    // evaluation
    ZeroActual = 50,
    // ingest
    MalformedRow = 60,
    NonPositivePrice = 61,
    VolumeOutOfRange = 62,
    MalformedRecord = 63,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// 1-based input line for parser errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

} // namespace crudecast

#endif
