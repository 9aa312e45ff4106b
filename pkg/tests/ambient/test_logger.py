"""Tests for logger: setup, JSON records and contextual adapters."""
import json
import logging

import pytest

from logger import JsonFormatter, get_logger, get_logger_with_context, log_context, setup_logging


@pytest.fixture(autouse=True)
def reset_logging():
    """Reset logging configuration before and after each test."""
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
        handler.close()
    logging.root.setLevel(logging.WARNING)

    yield

    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
        handler.close()
    logging.root.setLevel(logging.WARNING)


def make_record(**extra):
    """A log record carrying ``extra`` fields."""
    record = logging.LogRecord('homalg.test', logging.INFO, 'module.py', 12, 'Assembled %s', ('complex',), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestSetup:
    """setup_logging and get_logger."""

    def test_get_logger_name(self):
        """Loggers are named after their module."""
        assert get_logger('hochschild').name == 'hochschild'

    def test_single_handler(self):
        """Calling setup twice leaves one handler."""
        setup_logging(level='INFO')
        setup_logging(level='DEBUG')
        assert len(logging.root.handlers) == 1
        assert logging.root.level == logging.DEBUG

    def test_json_handler(self):
        """json_format installs the JSON formatter."""
        setup_logging(json_format=True)
        assert isinstance(logging.root.handlers[0].formatter, JsonFormatter)

    def test_log_file(self, tmp_path):
        """Records go to the file when one is given."""
        path = tmp_path / 'homalg.log'
        setup_logging(level='INFO', log_file=str(path))
        get_logger('cli').info('Run started')
        logging.root.handlers[0].flush()
        assert 'Run started' in path.read_text(encoding='utf-8')


class TestJsonFormatter:
    """One JSON object per record."""

    def test_standard_fields(self):
        """Level, logger and the formatted message are present."""
        data = json.loads(JsonFormatter().format(make_record()))
        assert data['level'] == 'INFO'
        assert data['logger'] == 'homalg.test'
        assert data['message'] == 'Assembled complex'
        assert data['line'] == 12

    def test_extra_fields(self):
        """Fields passed through extra are copied."""
        data = json.loads(JsonFormatter().format(make_record(suite='hochschild', seed=3)))
        assert data['suite'] == 'hochschild'
        assert data['seed'] == 3

    def test_unserializable_extra(self):
        """Values without a JSON form are stringified."""
        data = json.loads(JsonFormatter().format(make_record(bounds=(1, 2), witness={1, 2})))
        assert data['bounds'] == [1, 2]
        assert isinstance(data['witness'], str)


class TestContext:
    """get_logger_with_context and log_context."""

    def test_adapter_carries_context(self):
        """The adapter stores its context."""
        adapter = get_logger_with_context(get_logger('sullivan'), suite='sullivan', seed=0)
        assert isinstance(adapter, logging.LoggerAdapter)
        assert adapter.extra == {'suite': 'sullivan', 'seed': 0}

    def test_log_context_tags_records(self, caplog):
        """Records inside the block carry the context."""
        with caplog.at_level(logging.INFO):
            with log_context(get_logger('cli'), suite='ainfty', seed=7) as log:
                log.info('Suite finished')
        record = [r for r in caplog.records if r.getMessage() == 'Suite finished'][0]
        assert record.suite == 'ainfty'
        assert record.seed == 7

    def test_nested_contexts_merge(self):
        """An adapter passed in keeps its context and gains the new one."""
        outer = get_logger_with_context(get_logger('cli'), seed=1)
        with log_context(outer, suite='formal_ops') as log:
            assert log.extra == {'seed': 1, 'suite': 'formal_ops'}
            assert log.logger is outer.logger
