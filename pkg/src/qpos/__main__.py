from qpos.cli import run

run()
