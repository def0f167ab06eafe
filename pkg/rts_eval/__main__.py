from rts_eval.cli import run

run()
