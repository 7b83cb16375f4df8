"""
Unit tests for dataset_io.py - dataset JSON, matrices, YAML config and model presets
"""

import json
import os
import sys
import tempfile
from fractions import Fraction
from unittest.mock import patch

import pytest
import yaml

# Add src to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../src')))
from dataset_io import (COMPONENT_SCHEMA, DEFAULT_CONFIG, THREADS_ENV, load_config, resolve_threads,
                        load_model_presets, parse_dataset, load_dataset, dataset_to_dict, dump_dataset,
                        validate_components, load_weight_matrix, load_skew_matrix, load_rat_matrix)
from localize import build_model, FlowFixedData
from errors import ConfigError, DatasetFormatError, DegenerateWeightError, DimensionMismatchError, InputError

MODELS_YAML = os.path.abspath(os.path.join(os.path.dirname(__file__), '../../configs/models.yaml'))


def sphere_doc():
    """S^2 x S^2 with the rotation of one factor: two fixed spheres."""
    return {
        'm': 2,
        'flow_orientable': True,
        'components': [
            {'name': name, 'm0': 1, 'weights': [{'mu': '1', 'mult': 1}],
             'orientation_matches': True, 'oracle': {'e(E0)': '2', 'c1(E1)': '0'}}
            for name in ('pole_north', 'pole_south')
        ],
    }


def write_temp(content, suffix):
    f = tempfile.NamedTemporaryFile(mode='w', suffix=suffix, delete=False)
    f.write(content)
    f.close()
    return f.name


class TestParseDataset:
    """Test dataset parsing and validation"""

    def test_parse_spheres(self):
        """Test a dataset with positive-dimensional components"""
        data = parse_dataset(sphere_doc())
        assert isinstance(data, FlowFixedData)
        assert [c.name for c in data.components] == ['pole_north', 'pole_south']
        assert data.components[0].oracle.as_strings() == {'e(E0)': '2', 'c1(E1)': '0'}

    def test_round_trip_model(self):
        """Test model -> dict -> dataset -> dict is stable"""
        doc = dataset_to_dict(build_model("cpm", alphas=[0, Fraction(1, 2), -3]))
        assert dataset_to_dict(parse_dataset(json.loads(json.dumps(doc)))) == doc

    def test_isolated_weights_are_grouped(self):
        """Test multiplicities and rational mu strings"""
        doc = dataset_to_dict(build_model("s4", alpha=1, beta=1))
        assert doc['components'][1]['weights'] == [{'mu': '1', 'mult': 2}]
        assert doc['components'][1]['orientation_matches'] is False

    def test_integer_mu_accepted(self):
        """Test plain JSON integers for mu"""
        doc = sphere_doc()
        doc['components'][0]['weights'][0]['mu'] = 3
        assert parse_dataset(doc).components[0].normal_weights[0].mu == 3

    @pytest.mark.edge_case
    def test_float_mu_rejected(self):
        """Test floats are not rationals"""
        doc = sphere_doc()
        doc['components'][0]['weights'][0]['mu'] = 0.5
        with pytest.raises(DatasetFormatError):
            parse_dataset(doc)

    @pytest.mark.edge_case
    def test_missing_keys(self):
        """Test required keys at each level"""
        doc = sphere_doc()
        del doc['components'][0]['weights']
        with pytest.raises(DatasetFormatError, match="weights"):
            parse_dataset(doc)
        with pytest.raises(DatasetFormatError, match="flow_orientable"):
            parse_dataset({'m': 2, 'components': []})

    @pytest.mark.edge_case
    def test_boolean_is_not_integer(self):
        """Test m = true"""
        doc = sphere_doc()
        doc['m'] = True
        with pytest.raises(DatasetFormatError):
            parse_dataset(doc)

    def test_empty_components(self):
        """Test no components"""
        with pytest.raises(DatasetFormatError):
            parse_dataset({'m': 2, 'flow_orientable': True, 'components': []})

    def test_dimension_mismatch_caught_by_schema(self):
        """Test m0 + normal rank must equal m, reported as a dimension mismatch"""
        doc = sphere_doc()
        doc['components'][1]['m0'] = 2
        with pytest.raises(DimensionMismatchError, match="component validation failed"):
            parse_dataset(doc)

    @pytest.mark.edge_case
    def test_negative_multiplicity(self):
        """Test a negative weight multiplicity is a dimension mismatch"""
        doc = sphere_doc()
        doc['components'][0]['weights'][0]['mult'] = -1
        with pytest.raises(DimensionMismatchError):
            parse_dataset(doc)

    @pytest.mark.edge_case
    def test_dimension_errors_are_not_format_errors(self):
        """Test dimension failures exit with the precondition status"""
        doc = sphere_doc()
        doc['components'][0]['m0'] = 0
        with pytest.raises(DimensionMismatchError) as excinfo:
            validate_components(doc['components'], 2)
        assert not isinstance(excinfo.value, DatasetFormatError)
        assert excinfo.value.exit_code == 2

    def test_duplicate_names_caught_by_schema(self):
        """Test unique component names"""
        doc = sphere_doc()
        doc['components'][1]['name'] = 'pole_north'
        with pytest.raises(DatasetFormatError):
            parse_dataset(doc)

    def test_degenerate_weight_is_precondition(self):
        """Test mu = 0 reaches the component validation"""
        doc = sphere_doc()
        doc['components'][0]['weights'][0]['mu'] = '0'
        with pytest.raises(DegenerateWeightError):
            parse_dataset(doc)

    def test_oracle_key_for_missing_bundle(self):
        """Test an oracle naming E2 when there is only E1"""
        doc = sphere_doc()
        doc['components'][0]['oracle'] = {'e(E0)': '2', 'c1(E2)': '0'}
        with pytest.raises(DimensionMismatchError):
            parse_dataset(doc)

    def test_validate_components_frame(self):
        """Test the validated table"""
        table = validate_components(sphere_doc()['components'], 2)
        assert list(table.columns) == list(COMPONENT_SCHEMA.columns)
        assert table['normal_rank'].tolist() == [1, 1]


class TestFiles:
    """Test reading and writing files"""

    def test_load_and_dump(self):
        """Test dump_dataset writes what load_dataset reads"""
        data = build_model("klein")
        path = write_temp('', '.json')
        try:
            text = dump_dataset(data, path)
            assert json.loads(text) == dataset_to_dict(data)
            assert dataset_to_dict(load_dataset(path)) == dataset_to_dict(data)
        finally:
            os.unlink(path)

    @pytest.mark.edge_case
    def test_dump_to_missing_directory(self):
        """Test an unwritable output path is an input error"""
        with pytest.raises(InputError, match="Cannot write"):
            dump_dataset(build_model("klein"), "/nonexistent/dir/flow.json")

    def test_malformed_json(self):
        """Test JSON errors carry a position"""
        path = write_temp('{"m": 2,\n  "components": [', '.json')
        try:
            with pytest.raises(DatasetFormatError, match="line 2"):
                load_dataset(path)
        finally:
            os.unlink(path)

    def test_missing_file(self):
        """Test unreadable path"""
        with pytest.raises(DatasetFormatError):
            load_dataset('/nonexistent/flow.json')

    def test_matrices(self):
        """Test weight, skew and plain rational matrices"""
        path = write_temp(json.dumps([["0", "-1/2"], ["1/2", "0"]]), '.json')
        try:
            assert load_weight_matrix(path).rows == ((0, Fraction(-1, 2)), (Fraction(1, 2), 0))
            assert load_skew_matrix(path).dimension == 2
            assert load_rat_matrix(path)[1][0] == Fraction(1, 2)
        finally:
            os.unlink(path)

    @pytest.mark.edge_case
    def test_matrix_not_nested(self):
        """Test a flat array"""
        path = write_temp(json.dumps(["1", "2"]), '.json')
        try:
            with pytest.raises(DatasetFormatError):
                load_rat_matrix(path)
        finally:
            os.unlink(path)


class TestConfig:
    """Test the runtime YAML config"""

    def test_defaults(self):
        """Test no file gives DEFAULT_CONFIG"""
        assert load_config(None) == DEFAULT_CONFIG

    def test_partial_override(self):
        """Test keys merge per section"""
        path = write_temp(yaml.dump({'runtime': {'threads': 3}, 'report': {'approx_digits': 4}}), '.yaml')
        try:
            config = load_config(path)
            assert config['runtime']['threads'] == 3
            assert config['report'] == {'approx_digits': 4, 'output_dir': None}
            assert config['logging'] == DEFAULT_CONFIG['logging']
        finally:
            os.unlink(path)

    def test_defaults_not_mutated(self):
        """Test loading never edits DEFAULT_CONFIG"""
        path = write_temp(yaml.dump({'runtime': {'threads': 9}}), '.yaml')
        try:
            load_config(path)
            assert DEFAULT_CONFIG['runtime']['threads'] is None
        finally:
            os.unlink(path)

    @pytest.mark.edge_case
    def test_bad_shapes(self):
        """Test non-mapping documents and sections"""
        for content in (yaml.dump([1, 2]), yaml.dump({'runtime': 4})):
            path = write_temp(content, '.yaml')
            try:
                with pytest.raises(ConfigError):
                    load_config(path)
            finally:
                os.unlink(path)

    def test_missing_config_file(self):
        """Test an unreadable config path"""
        with pytest.raises(ConfigError):
            load_config('/nonexistent/localize.yaml')


class TestResolveThreads:
    """Test worker count resolution"""

    def test_environment_wins(self):
        """Test RESIDUE_THREADS over the config"""
        assert resolve_threads({'runtime': {'threads': 2}}, {THREADS_ENV: '4'}) == 4

    def test_config_value(self):
        """Test runtime.threads"""
        assert resolve_threads({'runtime': {'threads': 2}}, {}) == 2

    def test_cpu_count_default(self, mocker):
        """Test fallback to the CPU count"""
        mocker.patch.object(os, 'cpu_count', return_value=7)
        assert resolve_threads(load_config(None), {}) == 7

    @pytest.mark.edge_case
    @pytest.mark.parametrize("raw", ['abc', '0', '-2', '1.5'])
    def test_invalid(self, raw):
        """Test non-positive and non-integer values"""
        with pytest.raises(ConfigError, match=THREADS_ENV):
            resolve_threads(load_config(None), {THREADS_ENV: raw})

    def test_reads_os_environ(self):
        """Test the process environment is used by default"""
        with patch.dict(os.environ, {THREADS_ENV: '3'}):
            assert resolve_threads(load_config(None)) == 3


class TestModelPresets:
    """Test the models YAML"""

    def test_shipped_presets(self):
        """Test the repository presets load, anchors included"""
        presets = load_model_presets(MODELS_YAML)
        assert presets['CP2']['kind'] == 'cpm'
        assert presets['S4']['kind'] == 's4'
        assert presets['S4_skew']['alpha'] == '2/3'
        assert presets['S4_skew']['beta'] == -5

    def test_missing_kind(self):
        """Test a preset without kind"""
        path = write_temp(yaml.dump({'models': {'broken': {'alphas': [0, 1]}}}), '.yaml')
        try:
            with pytest.raises(ValueError, match="Model preset 'broken' is missing required 'kind' in YAML config."):
                load_model_presets(path)
        finally:
            os.unlink(path)

    def test_missing_models_section(self):
        """Test a file without the models mapping"""
        path = write_temp(yaml.dump({'presets': {}}), '.yaml')
        try:
            with pytest.raises(ConfigError):
                load_model_presets(path)
        finally:
            os.unlink(path)
