import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emofit.embedding_io import (
    EmbeddingParseError,
    VectorSpace,
    load_embeddings,
    save_embeddings,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestVectorSpace:
    def test_basic_invariants(self):
        vs = VectorSpace(["a", "b"], np.array([[1, 0], [0, 1]], dtype=np.float32))
        assert len(vs) == 2
        assert vs.dim == 2
        assert vs.row("b") == 1
        assert "a" in vs and "c" not in vs

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            VectorSpace(["a", "a"], np.zeros((2, 2)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            VectorSpace(["a"], np.array([[np.nan, 0.0]]))

    def test_rejects_zero_dim(self):
        with pytest.raises(ValueError):
            VectorSpace(["a"], np.zeros((1, 0)))

    def test_matrix_is_read_only(self):
        vs = VectorSpace(["a"], np.ones((1, 2)))
        with pytest.raises(ValueError):
            vs.matrix[0, 0] = 5.0


class TestLoad:
    def test_three_line_glove(self, tmp_path):
        p = write(tmp_path / "f.vec", "a 1 0\nb 0 1\nc 1 1\n")
        vs = load_embeddings(p, "glove")
        assert len(vs) == 3
        assert vs.dim == 2
        assert vs.index["b"] == 1
        np.testing.assert_array_equal(vs.matrix, [[1, 0], [0, 1], [1, 1]])

    def test_dimension_mismatch_names_line(self, tmp_path):
        p = write(tmp_path / "f.vec", "a 1 0\nb 1 2 3\n")
        with pytest.raises(EmbeddingParseError, match="line 2"):
            load_embeddings(p, "glove")

    @pytest.mark.parametrize("bad", ["nan", "inf", "-inf", "1e39"])
    def test_non_finite_rejected(self, tmp_path, bad):
        p = write(tmp_path / "f.vec", f"a 1 {bad}\n")
        with pytest.raises(EmbeddingParseError, match="non-finite"):
            load_embeddings(p, "glove")

    def test_not_a_number(self, tmp_path):
        p = write(tmp_path / "f.vec", "a 1 x\n")
        with pytest.raises(EmbeddingParseError, match="line 1"):
            load_embeddings(p, "glove")

    def test_empty_file(self, tmp_path):
        p = write(tmp_path / "f.vec", "")
        with pytest.raises(EmbeddingParseError, match="empty"):
            load_embeddings(p, "glove")
        with pytest.raises(EmbeddingParseError, match="empty"):
            load_embeddings(p, "word2vec")

    def test_word2vec_header(self, tmp_path):
        p = write(tmp_path / "f.vec", "2 3\na 1 2 3\nb 4 5 6\n")
        vs = load_embeddings(p, "word2vec")
        assert len(vs) == 2 and vs.dim == 3

    def test_word2vec_header_row_mismatch(self, tmp_path):
        p = write(tmp_path / "f.vec", "3 2\na 1 2\nb 3 4\n")
        with pytest.raises(EmbeddingParseError, match="header"):
            load_embeddings(p, "word2vec")

    def test_word2vec_header_dim_mismatch(self, tmp_path):
        p = write(tmp_path / "f.vec", "1 3\na 1 2\n")
        with pytest.raises(EmbeddingParseError, match="line 2"):
            load_embeddings(p, "word2vec")

    def test_bad_header(self, tmp_path):
        p = write(tmp_path / "f.vec", "x y\na 1 2\n")
        with pytest.raises(EmbeddingParseError, match="header"):
            load_embeddings(p, "word2vec")

    def test_duplicates_keep_first_and_count(self, tmp_path):
        p = write(tmp_path / "f.vec", "a 1 0\nb 0 1\na 9 9\n")
        vs = load_embeddings(p, "glove")
        assert vs.tokens == ["a", "b"]
        np.testing.assert_array_equal(vs.vector("a"), [1, 0])
        assert vs.load_report.duplicates_skipped == 1
        assert vs.load_report.rows_kept == 2

    def test_lowercase_flag_merges_case_variants(self, tmp_path):
        p = write(tmp_path / "f.vec", "Cat 1 0\ncat 0 1\n")
        vs = load_embeddings(p, "glove", lowercase=True)
        assert vs.tokens == ["cat"]
        assert vs.load_report.duplicates_skipped == 1
        vs2 = load_embeddings(p, "glove")
        assert vs2.tokens == ["Cat", "cat"]

    def test_unknown_format(self, tmp_path):
        p = write(tmp_path / "f.vec", "a 1\n")
        with pytest.raises(ValueError, match="format"):
            load_embeddings(p, "binary")


class TestSave:
    def test_refuses_empty_space(self, tmp_path):
        vs = VectorSpace([], np.zeros((0, 3)))
        with pytest.raises(ValueError, match="empty"):
            save_embeddings(vs, tmp_path / "o.vec", "glove")

    def test_single_cell_glove(self, tmp_path):
        vs = VectorSpace(["x"], np.array([[0.5]], dtype=np.float32))
        out = tmp_path / "o.vec"
        save_embeddings(vs, out, "glove")
        assert out.read_text(encoding="utf-8") == "x 0.5\n"

    def test_row_order_matches_token_order(self, tmp_path):
        vs = VectorSpace(["z", "a", "m"], np.eye(3, dtype=np.float32))
        out = tmp_path / "o.vec"
        save_embeddings(vs, out, "glove")
        first_fields = [ln.split()[0] for ln in out.read_text().splitlines()]
        assert first_fields == ["z", "a", "m"]

    def test_unwritable_path(self, tmp_path):
        vs = VectorSpace(["x"], np.ones((1, 1)))
        with pytest.raises(OSError):
            save_embeddings(vs, tmp_path / "nodir" / "o.vec", "glove")


class TestRoundTrip:
    """save then load reproduces tokens exactly and values bit-for-bit."""

    @pytest.mark.parametrize("fmt", ["glove", "word2vec"])
    def test_random_100_words(self, tmp_path, fmt):
        rng = np.random.default_rng(3)
        tokens = [f"w{i}" for i in range(100)]
        matrix = (rng.standard_normal((100, 8)) * 10 ** rng.integers(-6, 6, (100, 1))).astype(
            np.float32
        )
        vs = VectorSpace(tokens, matrix)
        path = tmp_path / "f.vec"
        save_embeddings(vs, path, fmt)
        back = load_embeddings(path, fmt)
        assert back.tokens == vs.tokens
        np.testing.assert_array_equal(back.matrix, vs.matrix)

    def test_unicode_tokens(self, tmp_path):
        vs = VectorSpace(["naïve", "Gefühl", "喜び"], np.eye(3, dtype=np.float32))
        path = tmp_path / "f.vec"
        save_embeddings(vs, path, "glove")
        assert load_embeddings(path, "glove").tokens == vs.tokens

    @settings(max_examples=30, deadline=None)
    @given(
        tokens=st.lists(
            st.text(
                alphabet=st.characters(
                    blacklist_categories=("Zs", "Zl", "Zp", "Cc", "Cf", "Cs", "Co", "Cn")
                ),
                min_size=1,
                max_size=6,
            ),
            min_size=1,
            max_size=8,
            unique=True,
        ),
        dim=st.integers(min_value=1, max_value=5),
        data=st.data(),
    )
    def test_property_round_trip(self, tmp_path_factory, tokens, dim, data):
        values = data.draw(
            st.lists(
                st.lists(
                    st.floats(allow_nan=False, allow_infinity=False, width=32),
                    min_size=dim,
                    max_size=dim,
                ),
                min_size=len(tokens),
                max_size=len(tokens),
            )
        )
        vs = VectorSpace(tokens, np.array(values, dtype=np.float32))
        path = tmp_path_factory.mktemp("rt") / "f.vec"
        save_embeddings(vs, path, "glove")
        back = load_embeddings(path, "glove")
        assert back.tokens == vs.tokens
        np.testing.assert_array_equal(back.matrix, vs.matrix)
