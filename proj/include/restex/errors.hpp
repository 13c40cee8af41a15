#pragma once

#include <stdexcept>
#include <string>

namespace restex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// spec_ingest
class ParseError : public Error {
 public:
  using Error::Error;
};
class UnresolvedRef : public Error {
 public:
  using Error::Error;
};
class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

// semantic_model
class ModelSchemaError : public Error {
 public:
  using Error::Error;
};
class DanglingReference : public Error {
 public:
  using Error::Error;
};

// sampling
class NoSelectableOperation : public Error {
 public:
  using Error::Error;
};

// generator / http
class EndpointUnreachable : public Error {
 public:
  using Error::Error;
};

// trace_recreate
class SinkWriteError : public Error {
 public:
  using Error::Error;
};
class NotReproducible : public Error {
 public:
  using Error::Error;
};
class SymbolResolutionFailure : public Error {
 public:
  using Error::Error;
};
class ScriptFormatError : public Error {
 public:
  using Error::Error;
};

// bookshop fixture
class PortInUse : public Error {
 public:
  using Error::Error;
};

}  // namespace restex
