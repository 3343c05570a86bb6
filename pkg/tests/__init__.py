# Tests for Smart Agriculture Advisory System
