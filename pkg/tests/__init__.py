# Tests for opdp
