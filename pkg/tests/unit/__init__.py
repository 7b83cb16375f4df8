# Unit tests package

