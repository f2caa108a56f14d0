#include <crudecast/error.hpp>

namespace crudecast {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::StageFailure: return "StageFailure";
    case ErrorCode::EmptyAfterAlignment: return "EmptyAfterAlignment";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::LagExceedsLength: return "LagExceedsLength";
    case ErrorCode::OrderExceedsLength: return "OrderExceedsLength";
    case ErrorCode::BoundaryOutOfRange: return "BoundaryOutOfRange";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::CalendarMismatch: return "CalendarMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::OverlappingLexicon: return "OverlappingLexicon";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::SingularRegression: return "SingularRegression";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ExogMissing: return "ExogMissing";
    case ErrorCode::NonStationaryParams: return "NonStationaryParams";
    case ErrorCode::MissingFutureExog: return "MissingFutureExog";
    case ErrorCode::CollinearRegressors: return "CollinearRegressors";
    case ErrorCode::ZeroActual: return "ZeroActual";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::VolumeOutOfRange: return "VolumeOutOfRange";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    }
    return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) {
        out += " (line " + std::to_string(*line) + ")";
    }
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

} // namespace crudecast
