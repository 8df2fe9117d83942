#pragma once

#include <stdexcept>
#include <string>

namespace cvcc {

// Every failure the stack can report, one code per contract error class.
// Receivers and the simulator key their outcome taxonomy off these names,
// so the set and the spelling are load-bearing.
enum class Errc {
    // crypto-core
    LengthMismatch,
    FieldTooLong,
    InvalidElement,
    ZeroScalar,
    EmptyBatch,
    TagMismatch,
    // protocol
    InvalidGroup,
    EmptyCredential,
    BadCredentials,
    PayloadTooLong,
    NotLoggedIn,
    StaleTimestamp,
    ReplayDetected,
    BadAuthenticator,
    BadCertificate,
    ExpiredCertificate,
    ConfirmMismatch,
    // vc-store
    EmptyKeywords,
    EmptyKeyword,
    MalformedUpload,
    DuplicateRecordId,
    NotFound,
    // metrics
    UnknownOpKind,
    // netsim / cli
    OutOfRange,
    ConfigInvalid,
    ParseError,
    ValidationError,
    Internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace cvcc
