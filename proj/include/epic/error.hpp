#pragma once

#include <stdexcept>
#include <string>

namespace epic {

enum class Errc {
    Io,
    EmptyFile,
    MissingTarget,
    RaggedRow,
    InvalidKind,
    InvalidArgument,
    TooFewRows,
    CodeSpaceExhausted,
    UnknownValue,
    UnknownCode,
    InsufficientClassRows,
    MissingCodebook,
    EmptyDraw,
    AuthError,
    Timeout,
    RateLimited,
    MalformedResponse,
    Transport,
    EmptyLog,
    LengthMismatch,
    SchemaMismatch,
    Config,
};

const char* errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace epic
