#pragma once

// Exception types shared across the library. Every throwing operation names
// one of these; the CLI maps them onto its exit codes.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spssr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// field
struct MismatchedField : Error { using Error::Error; };
struct NotPrime : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// parameters and demands
struct InvalidServerCount : Error { using Error::Error; };
struct InvalidDemandSize : Error { using Error::Error; };
struct WrongDemandSize : Error { using Error::Error; };
struct OutOfRangeServer : Error { using Error::Error; };
struct DemandNotInFamily : Error { using Error::Error; };

// randomness
struct ExhaustedRandomness : Error { using Error::Error; };

// matrix, database, and payload shapes
struct ShapeMismatch : Error { using Error::Error; };

// framing; `code` is the in-band error code from the wire error table
struct WireError : Error {
  WireError(std::uint16_t code, const std::string& what) : Error(what), code(code) {}
  std::uint16_t code;
};

// audits
struct BudgetExceeded : Error { using Error::Error; };

// transport; `server` is the 1-based failing server index, 0 if unknown
struct TransportError : Error {
  TransportError(int server, const std::string& what) : Error(what), server(server) {}
  int server;
};
struct BindError : Error { using Error::Error; };

}  // namespace spssr
