#include "epic/error.hpp"

namespace epic {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::Io: return "Io";
        case Errc::EmptyFile: return "EmptyFile";
        case Errc::MissingTarget: return "MissingTarget";
        case Errc::RaggedRow: return "RaggedRow";
        case Errc::InvalidKind: return "InvalidKind";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::TooFewRows: return "TooFewRows";
        case Errc::CodeSpaceExhausted: return "CodeSpaceExhausted";
        case Errc::UnknownValue: return "UnknownValue";
        case Errc::UnknownCode: return "UnknownCode";
        case Errc::InsufficientClassRows: return "InsufficientClassRows";
        case Errc::MissingCodebook: return "MissingCodebook";
        case Errc::EmptyDraw: return "EmptyDraw";
        case Errc::AuthError: return "AuthError";
        case Errc::Timeout: return "Timeout";
        case Errc::RateLimited: return "RateLimited";
        case Errc::MalformedResponse: return "MalformedResponse";
        case Errc::Transport: return "Transport";
        case Errc::EmptyLog: return "EmptyLog";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::SchemaMismatch: return "SchemaMismatch";
        case Errc::Config: return "Config";
    }
    return "Unknown";
}

}  // namespace epic
