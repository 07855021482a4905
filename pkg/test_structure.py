#!/usr/bin/env python3
"""
Test script to verify project structure and syntax
Run this before installing dependencies to check structure
"""
import os
import sys

PACKAGES = ['statevec', 'pauli', 'codes', 'circuits', 'engine', 'ftcheck', 'analysis', 'utils']

MODULES = [
    'src/errors.py',
    'src/statevec/gates.py',
    'src/statevec/simulator.py',
    'src/pauli/paulistring.py',
    'src/pauli/noise.py',
    'src/codes/stabilizer.py',
    'src/codes/decoder.py',
    'src/codes/flag_table.py',
    'src/circuits/circuit.py',
    'src/circuits/frame.py',
    'src/circuits/support.py',
    'src/circuits/ec.py',
    'src/circuits/gadgets.py',
    'src/circuits/protocols.py',
    'src/engine/executors.py',
    'src/engine/trials.py',
    'src/engine/lifting.py',
    'src/engine/records.py',
    'src/ftcheck/report.py',
    'src/ftcheck/prep.py',
    'src/ftcheck/flags.py',
    'src/ftcheck/ordering.py',
    'src/analysis/fits.py',
    'src/analysis/overhead.py',
    'src/utils/config.py',
    'src/utils/logger.py',
    'src/utils/validators.py',
]


def test_structure():
    """Test that all required files and directories exist"""

    print("🧪 Testing flagmagic Project Structure\n")

    required_files = [
        'main.py',
        'requirements.txt',
        'README.md',
        'DESIGN.md',
        'setup.sh',
        'pytest.ini',
        'config/default.yaml',
        'data/golden_fits.yaml',
        'data/color17.yaml',
        'tests/conftest.py',
        'src/__init__.py',
    ] + [f'src/{pkg}/__init__.py' for pkg in PACKAGES] + MODULES

    required_dirs = ['src', 'tests', 'data', 'config'] + [f'src/{pkg}' for pkg in PACKAGES]

    print("Checking directories...")
    all_dirs_exist = True
    for dir_path in required_dirs:
        if os.path.isdir(dir_path):
            print(f"  ✓ {dir_path}")
        else:
            print(f"  ✗ {dir_path} - MISSING")
            all_dirs_exist = False

    print("\nChecking files...")
    all_files_exist = True
    for file_path in required_files:
        if os.path.isfile(file_path):
            size = os.path.getsize(file_path)
            print(f"  ✓ {file_path} ({size} bytes)")
        else:
            print(f"  ✗ {file_path} - MISSING")
            all_files_exist = False

    print("\nChecking Python syntax...")
    syntax_ok = True
    for py_file in ['main.py'] + MODULES:
        if not os.path.isfile(py_file):
            continue
        try:
            with open(py_file, 'r') as f:
                compile(f.read(), py_file, 'exec')
            print(f"  ✓ {py_file}")
        except SyntaxError as e:
            print(f"  ✗ {py_file} - SYNTAX ERROR: {e}")
            syntax_ok = False

    print("\n" + "="*60)
    if all_dirs_exist and all_files_exist and syntax_ok:
        print("✅ All structure tests passed!")
        print("\nNext steps:")
        print("1. Run: ./setup.sh")
        print("2. Activate venv: source venv/bin/activate")
        print("3. Run tests: pytest")
        print("4. Test CLI: python main.py --help")
        return 0
    else:
        print("❌ Some tests failed!")
        return 1


if __name__ == '__main__':
    sys.exit(test_structure())
