#pragma once

#include <stdexcept>
#include <string>

namespace arena {

// Base class for every typed failure raised by the engine.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ARENA_ERROR(NAME)                    \
    struct NAME : Error {                    \
        using Error::Error;                  \
    }

// data ingest
ARENA_ERROR(MalformedRow);
ARENA_ERROR(NonUniformSpacing);
ARENA_ERROR(NonFiniteValue);
ARENA_ERROR(SeriesTooShort);
ARENA_ERROR(MalformedLine);

// metrics
ARENA_ERROR(LengthMismatch);
ARENA_ERROR(ZeroActualForMape);
ARENA_ERROR(NonPositiveScore);

// prompt catalog / gateway
ARENA_ERROR(MissingBinding);
ARENA_ERROR(UnknownTemplate);
ARENA_ERROR(Timeout);
ARENA_ERROR(RateLimited);
ARENA_ERROR(MalformedJson);
ARENA_ERROR(BackendUnavailable);

// embeddings
ARENA_ERROR(DimensionMismatch);
ARENA_ERROR(ZeroNorm);

// agents
ARENA_ERROR(NoPublications);

// evaluation
ARENA_ERROR(TooFewAgents);
ARENA_ERROR(KeyMismatch);
ARENA_ERROR(AllWouldBeEliminated);

// communication / reflection / prediction
ARENA_ERROR(MalformedDisclosure);
ARENA_ERROR(DeadTarget);
ARENA_ERROR(MalformedReflection);
ARENA_ERROR(PredictorFailure);

// orchestration
ARENA_ERROR(ConfigInvalid);
ARENA_ERROR(DataUnloadable);
ARENA_ERROR(LedgerCorrupt);

#undef ARENA_ERROR

}  // namespace arena
