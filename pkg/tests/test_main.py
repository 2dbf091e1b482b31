"""
Тести для головного модуля `main`.

Ці тести перевіряють, що головна функція `main` правильно розбирає
аргументи командного рядка, передає керування підкомандам експерименту
та перетворює помилки на коди завершення.
"""

from unittest.mock import AsyncMock, patch

import pytest

from comhom import main
from comhom.common.exceptions import ConfigurationError


@pytest.fixture(autouse=True)
def quiet_logging():
    """Не налаштовуємо файлове логування під час тестів."""
    with patch('comhom.main.setup_logging'):
        yield


@patch('comhom.experiment.main.run', new_callable=AsyncMock, return_value=0)
async def test_main_report_command(mock_run):
    """Тестує, що команда `report` викликає обробник експерименту з розпарсеними аргументами."""
    # Act
    exit_code = await main.main(['report', '--in', 'out/synth'])

    # Assert
    assert exit_code == 0
    args = mock_run.call_args.args[0]
    assert args.command == 'report'
    assert args.input_dir == 'out/synth'


@patch('comhom.experiment.main.run', new_callable=AsyncMock, return_value=1)
async def test_main_run_command_propagates_exit_code(mock_run):
    exit_code = await main.main(['run', '--config', 'configs/experiment_synth.json', '--jobs', '4'])

    assert exit_code == 1
    args = mock_run.call_args.args[0]
    assert (args.command, args.jobs, args.out) == ('run', 4, None)


@patch('comhom.experiment.main.run', new_callable=AsyncMock, side_effect=ConfigurationError("bad"))
async def test_configuration_error_exits_with_2(mock_run):
    """Тестує, що помилка конфігурації перетворюється на код завершення 2."""
    assert await main.main(['grad-check', '--points', '1']) == main.EXIT_CONFIG_ERROR


async def test_no_arguments_prints_help(capsys):
    assert await main.main([]) == 1
    assert 'synth-data' in capsys.readouterr().err


async def test_synth_data_writes_dataset(tmp_path):
    """Наскрізна перевірка `synth-data` з крихітною специфікацією когорти."""
    # Arrange
    spec = tmp_path / "spec.json"
    spec.write_text('{"subjects": 2, "singles_per_class": 1, "combos_per_class": 1, "window_samples": 16}')
    out = tmp_path / "cohort"

    # Act
    exit_code = await main.main(['synth-data', '--spec', str(spec), '--out', str(out), '--seed', '3'])

    # Assert
    assert exit_code == 0
    assert (out / "manifest.json").exists()
    assert (out / "data_1.bin").stat().st_size == 24 * 8 * 16 * 4


async def test_invalid_spec_exits_with_2(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"subjects": 0}')
    assert await main.main(['synth-data', '--spec', str(spec), '--out', str(tmp_path / "x")]) == 2


async def test_fold_outside_roster_exits_with_2(tmp_path):
    """Фолд поза списком суб'єктів - помилка конфігурації, а не невдалий запуск."""
    # Arrange
    config = tmp_path / "experiment.json"
    config.write_text(
        '{"name": "bad-fold", "synth": {"subjects": 3, "singles_per_class": 1, "combos_per_class": 1,'
        ' "window_samples": 16}, "folds": [3], "seeds": [0], "downstream": [{"algorithm": "knn"}]}'
    )

    # Act
    exit_code = await main.main(['run', '--config', str(config), '--out', str(tmp_path / "out")])

    # Assert
    assert exit_code == main.EXIT_CONFIG_ERROR
    assert not (tmp_path / "out" / "aggregate").exists()
