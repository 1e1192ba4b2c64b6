"""Generators, IDX parsing, and CSV persistence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexflow import Dataset, DomainError, FormatError, one_hot
from simplexflow.datasets import (
    default_centers,
    gen_blobs,
    gen_digit_images,
    gen_two_class,
    images_to_dataset,
    load_csv,
    load_idx,
    read_idx_images,
    read_idx_labels,
    save_csv,
    shuffle_split,
    write_idx_images,
    write_idx_labels,
)
from simplexflow.errors import DimensionError


class TestOneHot:
    def test_examples(self):
        np.testing.assert_array_equal(one_hot(1, 3), [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(one_hot(3, 3), [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(one_hot(2, 2), [0.0, 1.0])

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            one_hot(0, 3)
        with pytest.raises(DomainError):
            one_hot(4, 3)


class TestDatasetInvariants:
    def test_count_mismatch(self):
        with pytest.raises(DimensionError):
            Dataset(inputs=np.zeros((3, 2)), labels=np.zeros((2, 2)))

    def test_non_one_hot_labels(self):
        with pytest.raises(DomainError):
            Dataset(inputs=np.zeros((1, 2)), labels=np.array([[0.5, 0.5]]))
        with pytest.raises(DomainError):
            Dataset(inputs=np.zeros((1, 2)), labels=np.array([[1.0, 1.0]]))

    def test_label_indices_are_one_based(self):
        ds = Dataset(inputs=np.zeros((2, 1)), labels=np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_array_equal(ds.label_indices(), [2, 1])


class TestBlobs:
    def test_paper_scale_dimensions(self):
        ds = gen_blobs(1000, default_centers(3), 0.45, seed=7)
        assert (ds.n_points, ds.input_dim, ds.n_labels) == (3000, 2, 3)

    def test_zero_sigma_collapses_to_centers(self):
        centers = [[0.0, 0.0], [1.0, 5.0]]
        ds = gen_blobs(3, centers, 0.0, seed=1)
        np.testing.assert_array_equal(ds.inputs[:3], np.tile(centers[0], (3, 1)))
        np.testing.assert_array_equal(ds.inputs[3:], np.tile(centers[1], (3, 1)))

    def test_same_seed_bit_identical(self):
        a = gen_blobs(50, default_centers(3), 0.3, seed=9)
        b = gen_blobs(50, default_centers(3), 0.3, seed=9)
        assert np.array_equal(a.inputs, b.inputs)
        assert np.array_equal(a.labels, b.labels)

    def test_duplicate_centers_rejected(self):
        with pytest.raises(Exception):
            gen_blobs(5, [[0.0, 0.0], [0.0, 0.0]], 0.1, seed=0)


class TestTwoClass:
    def test_paper_scale_dimensions(self):
        for kind in ("concentric_rings", "interleaved_arcs"):
            ds = gen_two_class(kind, 1000, 0.1, seed=7)
            assert (ds.n_points, ds.input_dim, ds.n_labels) == (1000, 2, 2)

    def test_noiseless_rings_are_radius_separated(self):
        ds = gen_two_class("concentric_rings", 200, 0.0, seed=3)
        radii = np.linalg.norm(ds.inputs, axis=1)
        labels = ds.label_indices()
        assert radii[labels == 2].min() > radii[labels == 1].max()

    def test_determinism(self):
        a = gen_two_class("interleaved_arcs", 100, 0.05, seed=11)
        b = gen_two_class("interleaved_arcs", 100, 0.05, seed=11)
        assert np.array_equal(a.inputs, b.inputs)

    def test_unknown_kind(self):
        with pytest.raises(Exception):
            gen_two_class("spirals", 10, 0.1, seed=0)


class TestCsvRoundTrip:
    def test_generated_dataset_round_trips_exactly(self, tmp_path):
        ds = gen_blobs(20, default_centers(3), 0.5, seed=13)
        path = tmp_path / "ds.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.inputs, ds.inputs)
        assert np.array_equal(back.labels, ds.labels)
        assert back.name == ds.name
        assert back.seed == ds.seed

    @settings(max_examples=20)
    @given(
        n=st.integers(min_value=0, max_value=12),
        m=st.integers(min_value=1, max_value=5),
        n_labels=st.integers(min_value=2, max_value=4),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_random_dataset_round_trips(self, tmp_path_factory, n, m, n_labels, seed):
        rng = np.random.default_rng(seed)
        labels = np.zeros((n, n_labels))
        if n:
            labels[np.arange(n), rng.integers(0, n_labels, n)] = 1.0
        ds = Dataset(
            inputs=rng.uniform(-1e3, 1e3, (n, m)),
            labels=labels,
            name="prop",
            seed=seed,
        )
        path = tmp_path_factory.mktemp("csv") / "ds.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.inputs, ds.inputs)
        assert np.array_equal(back.labels, ds.labels)

    def test_empty_dataset(self, tmp_path):
        ds = Dataset(inputs=np.zeros((0, 2)), labels=np.zeros((0, 3)), name="empty")
        path = tmp_path / "empty.csv"
        save_csv(ds, path)
        assert len(path.read_text().splitlines()) == 2
        back = load_csv(path)
        assert back.n_points == 0
        assert back.input_dim == 2
        assert back.n_labels == 3

    def test_wrong_column_count_cites_line(self, tmp_path):
        ds = gen_blobs(3, default_centers(2), 0.1, seed=0)
        path = tmp_path / "bad.csv"
        save_csv(ds, path)
        lines = path.read_text().splitlines()
        lines[4] = "1.0,2.0"  # drop the label column on file line 5
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(FormatError) as err:
            load_csv(path)
        assert err.value.location == 5
        assert "line 5" in str(err.value)

    def test_bad_label_value(self, tmp_path):
        ds = gen_blobs(2, default_centers(2), 0.1, seed=0)
        path = tmp_path / "bad.csv"
        save_csv(ds, path)
        lines = path.read_text().splitlines()
        parts = lines[2].split(",")
        parts[-1] = "9"
        lines[2] = ",".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(FormatError):
            load_csv(path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "noheader.csv"
        path.write_text("x_1,x_2,label\n0.0,0.0,1\n")
        with pytest.raises(FormatError):
            load_csv(path)


class TestIdx:
    def test_round_trip_is_byte_exact(self, tmp_path):
        images, digits = gen_digit_images(40, seed=5)
        img_path = tmp_path / "imgs.idx3-ubyte"
        lab_path = tmp_path / "labs.idx1-ubyte"
        write_idx_images(images, img_path)
        write_idx_labels(digits, lab_path)
        src_img = img_path.read_bytes()
        src_lab = lab_path.read_bytes()

        parsed_images = read_idx_images(img_path)
        parsed_labels = read_idx_labels(lab_path)
        out_img = tmp_path / "imgs2.idx3-ubyte"
        out_lab = tmp_path / "labs2.idx1-ubyte"
        write_idx_images(parsed_images, out_img)
        write_idx_labels(parsed_labels, out_lab)
        assert out_img.read_bytes() == src_img
        assert out_lab.read_bytes() == src_lab

    def test_load_idx_scales_and_one_hots(self, tmp_path):
        images, digits = gen_digit_images(10, seed=2)
        images[0] = 0  # an all-black image must become a zero vector
        img_path = tmp_path / "i.idx"
        lab_path = tmp_path / "l.idx"
        write_idx_images(images, img_path)
        write_idx_labels(digits, lab_path)
        ds = load_idx(img_path, lab_path)
        assert (ds.n_points, ds.input_dim, ds.n_labels) == (10, 784, 10)
        assert np.all(ds.inputs[0] == 0.0)
        assert ds.inputs.max() <= 1.0
        np.testing.assert_array_equal(ds.label_indices(), digits + 1)

    def test_digit_zero_maps_to_label_one(self, tmp_path):
        images = np.zeros((1, 28, 28), dtype=np.uint8)
        img_path, lab_path = tmp_path / "i.idx", tmp_path / "l.idx"
        write_idx_images(images, img_path)
        write_idx_labels(np.array([0], dtype=np.uint8), lab_path)
        ds = load_idx(img_path, lab_path)
        np.testing.assert_array_equal(ds.labels[0], one_hot(1, 10))

    def test_bad_magic_cites_offset(self, tmp_path):
        path = tmp_path / "bad.idx"
        path.write_bytes(b"\x00\x00\x08\x99" + b"\x00" * 12)
        with pytest.raises(FormatError) as err:
            read_idx_images(path)
        assert err.value.location == 0

    def test_truncated_file(self, tmp_path):
        images, _ = gen_digit_images(3, seed=0)
        path = tmp_path / "trunc.idx"
        write_idx_images(images, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(FormatError):
            read_idx_images(path)

    def test_count_mismatch_between_files(self, tmp_path):
        images, digits = gen_digit_images(4, seed=1)
        img_path, lab_path = tmp_path / "i.idx", tmp_path / "l.idx"
        write_idx_images(images, img_path)
        write_idx_labels(digits[:3], lab_path)
        with pytest.raises(FormatError):
            load_idx(img_path, lab_path)


class TestDigits:
    def test_deterministic(self):
        a_imgs, a_labs = gen_digit_images(25, seed=4)
        b_imgs, b_labs = gen_digit_images(25, seed=4)
        assert np.array_equal(a_imgs, b_imgs)
        assert np.array_equal(a_labs, b_labs)

    def test_dataset_conversion(self):
        images, digits = gen_digit_images(30, seed=6)
        ds = images_to_dataset(images, digits)
        assert ds.n_labels == 10
        assert ds.input_dim == 784


class TestShuffleSplit:
    def test_partition(self):
        ds = gen_blobs(10, default_centers(2), 0.2, seed=0)
        train, test = shuffle_split(ds, 15, seed=3)
        assert train.n_points == 15
        assert test.n_points == 5
        combined = np.concatenate([train.inputs, test.inputs])
        assert np.array_equal(np.sort(combined, axis=0), np.sort(ds.inputs, axis=0))
