//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_ERRORS_HPP
#define MHNPATH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mhnpath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define MHNPATH_DEFINE_ERROR(Name, Base)     \
  class Name : public Base {                 \
  public:                                    \
    using Base::Base;                        \
  }

// chemgraph
MHNPATH_DEFINE_ERROR(SyntaxError, Error);
MHNPATH_DEFINE_ERROR(ValenceError, Error);
MHNPATH_DEFINE_ERROR(RingError, SyntaxError);
MHNPATH_DEFINE_ERROR(EmptyInput, Error);

// templates
MHNPATH_DEFINE_ERROR(UnsupportedPrimitive, SyntaxError);
MHNPATH_DEFINE_ERROR(UnmappedAtomError, Error);
MHNPATH_DEFINE_ERROR(NoChangeError, Error);
MHNPATH_DEFINE_ERROR(LibraryLoadError, Error);

// mhn
MHNPATH_DEFINE_ERROR(ConfigError, Error);
MHNPATH_DEFINE_ERROR(ShapeError, Error);
MHNPATH_DEFINE_ERROR(IdOutOfRange, Error);
MHNPATH_DEFINE_ERROR(EmptyDataset, Error);
MHNPATH_DEFINE_ERROR(VersionError, Error);
MHNPATH_DEFINE_ERROR(ChecksumError, Error);
MHNPATH_DEFINE_ERROR(CorruptFile, Error);

// conditions / pricing / scoring
MHNPATH_DEFINE_ERROR(EmptyCandidates, Error);
MHNPATH_DEFINE_ERROR(PredictorError, Error);
MHNPATH_DEFINE_ERROR(VendorError, Error);
MHNPATH_DEFINE_ERROR(AuthError, VendorError);
MHNPATH_DEFINE_ERROR(RateLimited, VendorError);
MHNPATH_DEFINE_ERROR(Timeout, VendorError);
MHNPATH_DEFINE_ERROR(DomainError, Error);

// search / eval
MHNPATH_DEFINE_ERROR(FormatError, Error);
MHNPATH_DEFINE_ERROR(EmptyCases, Error);
MHNPATH_DEFINE_ERROR(NoRoutes, Error);

// generic IO
MHNPATH_DEFINE_ERROR(IoError, Error);

#undef MHNPATH_DEFINE_ERROR

}  // namespace mhnpath

#endif  // MHNPATH_ERRORS_HPP
