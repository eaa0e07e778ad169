#pragma once

#include <stdexcept>

namespace rtva {

// Base type for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };        // file or socket failure
struct FormatError : Error { using Error::Error; };    // unsupported file contents
struct ParamError : Error { using Error::Error; };     // invalid argument or config value
struct FramingError : Error { using Error::Error; };   // frame with wrong sample geometry
struct CodecError : Error { using Error::Error; };     // encode/decode failure
struct ProtocolError : Error { using Error::Error; };  // malformed wire data
struct TruncationError : ProtocolError { using ProtocolError::ProtocolError; };
struct InstrumentationError : Error { using Error::Error; };
struct EvalError : Error { using Error::Error; };      // metric undefined for the input

}  // namespace rtva
