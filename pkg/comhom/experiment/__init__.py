"""Конфігурація, виконання та зведення експериментів LOSO."""
